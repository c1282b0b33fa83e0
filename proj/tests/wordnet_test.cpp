#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "mini_wordnet.hpp"
#include "pointer_oracle.hpp"
#include "support.hpp"

using namespace cfprobe;
using cfprobe::testing::graph;

namespace {

bool has_lemma(const WordNetGraph& g, const SynsetId& id, std::string_view lemma) {
  const auto& lemmas = g.synset(id).lemmas;
  return std::any_of(lemmas.begin(), lemmas.end(), [&](const std::string& l) { return display_lemma(l) == lemma; });
}

bool any_has_lemma(const WordNetGraph& g, const std::vector<SynsetId>& ids, std::string_view lemma) {
  return std::any_of(ids.begin(), ids.end(), [&](const SynsetId& id) { return has_lemma(g, id, lemma); });
}

bool contains(const std::vector<std::string>& v, std::string_view s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::vector<SynsetId> sample_nouns(std::size_t n, std::uint32_t seed) {
  auto all = graph().synset_ids(PartOfSpeech::Noun);
  std::mt19937 rng(seed);
  std::vector<SynsetId> out;
  std::sample(all.begin(), all.end(), std::back_inserter(out), n, rng);
  return out;
}

std::vector<SynsetId> as_ids(const std::vector<std::uint32_t>& offsets) {
  std::vector<SynsetId> out;
  for (auto o : offsets) out.push_back({PartOfSpeech::Noun, o});
  return out;
}

}  // namespace

TEST(SynsetIdText, RoundTrips) {
  SynsetId id{PartOfSpeech::Noun, 2084071};
  EXPECT_EQ(to_string(id), "02084071-n");
  EXPECT_EQ(parse_synset_id("02084071-n"), id);
  EXPECT_EQ(parse_synset_id("00001740-a")->pos, PartOfSpeech::Adjective);
  EXPECT_FALSE(parse_synset_id("2084071-n"));
  EXPECT_FALSE(parse_synset_id("02084071-x"));
  EXPECT_FALSE(parse_synset_id("0208407a-n"));
}

TEST(Load, FullDatabaseHasExpectedSize) {
  // WordNet 3.0 ships 117659 synsets across the four data files.
  EXPECT_EQ(graph().synset_count(), 117659u);
  EXPECT_EQ(graph().synset_ids(PartOfSpeech::Noun).size(), 82115u);
}

TEST(Load, EmptyDirectoryIsMissingFile) {
  cfprobe::testing::TempDir dir("wn-empty");
  try {
    WordNetGraph::load(dir.path());
    FAIL() << "expected WordNetError";
  } catch (const WordNetError& e) {
    EXPECT_EQ(e.kind(), WordNetError::Kind::MissingFile);
  }
}

TEST(Load, MiniFixtureLoads) {
  cfprobe::testing::TempDir dir("wn-mini");
  write_mini_wordnet(dir, cfprobe::testing::mini_files());
  auto g = WordNetGraph::load(dir.path());
  EXPECT_EQ(g.synset_count(), 9u);
  auto dog = g.lookup("dog", PartOfSpeech::Noun);
  ASSERT_EQ(dog.size(), 1u);
  EXPECT_TRUE(any_has_lemma(g, g.hypernyms(dog[0]), "animal"));
  EXPECT_TRUE(any_has_lemma(g, g.siblings(dog[0]), "cat"));
  EXPECT_TRUE(any_has_lemma(g, g.hyponyms(dog[0]), "puppy"));
  EXPECT_EQ(g.lemmatize("puppies", PartOfSpeech::Noun), std::vector<std::string>{"puppy"});
  EXPECT_EQ(g.synonyms("small", PartOfSpeech::Adjective), (std::vector<std::string>{"little", "tiny"}));
  EXPECT_EQ(g.lookup("domestic dog", PartOfSpeech::Noun), dog);
}

TEST(Load, MalformedLineReportsFileAndLine) {
  cfprobe::testing::TempDir dir("wn-malformed");
  write_mini_wordnet(dir, cfprobe::testing::mini_files());
  auto text = cfprobe::testing::slurp(dir.path() / "data.verb");
  // Third line is the first record (two header lines precede it).
  auto pos = text.find(" v 02");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 5, " v zz");
  dir.write("data.verb", text);
  try {
    WordNetGraph::load(dir.path());
    FAIL() << "expected WordNetError";
  } catch (const WordNetError& e) {
    EXPECT_EQ(e.kind(), WordNetError::Kind::MalformedLine);
    EXPECT_EQ(std::filesystem::path(e.file()).filename(), "data.verb");
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("data.verb:3"), std::string::npos);
  }
}

TEST(Load, OffsetThatDoesNotMatchBytePositionIsMalformed) {
  cfprobe::testing::TempDir dir("wn-offset");
  write_mini_wordnet(dir, cfprobe::testing::mini_files());
  auto text = cfprobe::testing::slurp(dir.path() / "data.adv");
  text.replace(cfprobe::testing::kMiniHeader.size(), 8, "00000001");
  dir.write("data.adv", text);
  try {
    WordNetGraph::load(dir.path());
    FAIL() << "expected WordNetError";
  } catch (const WordNetError& e) {
    EXPECT_EQ(e.kind(), WordNetError::Kind::MalformedLine);
  }
}

TEST(Load, IndexEntryWithNonexistentOffsetIsDangling) {
  cfprobe::testing::TempDir dir("wn-dangling-index");
  write_mini_wordnet(dir, cfprobe::testing::mini_files(), {{"noun", "ghost n 1 0 1 0 00000007\n"}});
  try {
    WordNetGraph::load(dir.path());
    FAIL() << "expected WordNetError";
  } catch (const WordNetError& e) {
    EXPECT_EQ(e.kind(), WordNetError::Kind::DanglingPointer);
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST(Load, PointerToMissingSynsetIsDangling) {
  cfprobe::testing::TempDir dir("wn-dangling-ptr");
  auto files = cfprobe::testing::mini_files();
  files["noun"][3].pointers.push_back({"@", "noun", 42});  // record 42 does not exist
  write_mini_wordnet(dir, files);
  try {
    WordNetGraph::load(dir.path());
    FAIL() << "expected WordNetError";
  } catch (const WordNetError& e) {
    EXPECT_EQ(e.kind(), WordNetError::Kind::DanglingPointer);
  }
}

TEST(Lookup, DogFirstSenseIsTheCanine) {
  auto senses = graph().lookup("dog", PartOfSpeech::Noun);
  ASSERT_EQ(senses.size(), 7u);
  EXPECT_EQ(to_string(senses.front()), "02084071-n");
  EXPECT_TRUE(has_lemma(graph(), senses.front(), "canis familiaris"));
}

TEST(Lookup, CaseAndSpacesAreFolded) {
  EXPECT_EQ(graph().lookup("Dog", PartOfSpeech::Noun), graph().lookup("dog", PartOfSpeech::Noun));
  EXPECT_EQ(graph().lookup("hot dog", PartOfSpeech::Noun), graph().lookup("hot_dog", PartOfSpeech::Noun));
  EXPECT_FALSE(graph().lookup("hot dog", PartOfSpeech::Noun).empty());
}

TEST(Lookup, AbsentWordIsEmpty) {
  EXPECT_TRUE(graph().lookup("qzxv", PartOfSpeech::Noun).empty());
  EXPECT_TRUE(graph().lookup("", PartOfSpeech::Noun).empty());
}

TEST(Lookup, VerbAndSatelliteAdjective) {
  EXPECT_FALSE(graph().lookup("see", PartOfSpeech::Verb).empty());
  EXPECT_EQ(graph().lookup("tiny", PartOfSpeech::AdjectiveSatellite), graph().lookup("tiny", PartOfSpeech::Adjective));
}

TEST(Lemmatize, RegularAndIrregularForms) {
  const auto& g = graph();
  using V = std::vector<std::string>;
  EXPECT_EQ(g.lemmatize("dogs", PartOfSpeech::Noun), V{"dog"});
  EXPECT_EQ(g.lemmatize("dog", PartOfSpeech::Noun), V{"dog"});
  EXPECT_EQ(g.lemmatize("says", PartOfSpeech::Verb), V{"say"});
  EXPECT_EQ(g.lemmatize("mice", PartOfSpeech::Noun), V{"mouse"});
  EXPECT_EQ(g.lemmatize("women", PartOfSpeech::Noun), V{"woman"});
  EXPECT_EQ(g.lemmatize("boxes", PartOfSpeech::Noun), V{"box"});
  EXPECT_EQ(g.lemmatize("running", PartOfSpeech::Verb), V{"run"});
  EXPECT_EQ(g.lemmatize("Geese", PartOfSpeech::Noun), V{"goose"});
  EXPECT_TRUE(contains(g.lemmatize("better", PartOfSpeech::Adjective), "good"));
  EXPECT_EQ(g.lemmatize("better", PartOfSpeech::Adjective).front(), "better");
  EXPECT_TRUE(g.lemmatize("qzxvs", PartOfSpeech::Noun).empty());
}

TEST(Lemmatize, EveryReturnedFormIsIndexed) {
  for (const char* w : {"dogs", "churches", "ladies", "flies", "watched", "making", "biggest", "larger", "glasses"}) {
    for (auto pos : {PartOfSpeech::Noun, PartOfSpeech::Verb, PartOfSpeech::Adjective}) {
      for (const auto& form : graph().lemmatize(w, pos))
        EXPECT_FALSE(graph().lookup(form, pos).empty()) << w << " -> " << form;
    }
  }
}

TEST(Hypernyms, DogReachesCanine) {
  auto dog = graph().lookup("dog", PartOfSpeech::Noun).front();
  auto parents = graph().hypernyms(dog);
  EXPECT_TRUE(any_has_lemma(graph(), parents, "canine"));
  EXPECT_TRUE(any_has_lemma(graph(), parents, "domestic animal"));
}

TEST(Hypernyms, RootHasNone) {
  auto entity = graph().lookup("entity", PartOfSpeech::Noun);
  ASSERT_FALSE(entity.empty());
  EXPECT_TRUE(graph().hypernyms(entity.front()).empty());
}

TEST(Hypernyms, InstancePointersAreFollowed) {
  // Paris is an instance of national capital ("@i").
  auto paris = graph().lookup("paris", PartOfSpeech::Noun).front();
  EXPECT_TRUE(any_has_lemma(graph(), graph().hypernyms(paris), "national capital"));
}

TEST(Hypernyms, UnknownIdThrows) {
  try {
    graph().hypernyms({PartOfSpeech::Noun, 7});
    FAIL() << "expected WordNetError";
  } catch (const WordNetError& e) {
    EXPECT_EQ(e.kind(), WordNetError::Kind::UnknownSynset);
  }
  EXPECT_THROW(graph().synset({PartOfSpeech::Verb, 7}), WordNetError);
}

TEST(Hyponyms, DogHasImmediateBreedGroups) {
  auto dog = graph().lookup("dog", PartOfSpeech::Noun).front();
  auto children = graph().hyponyms(dog);
  EXPECT_TRUE(any_has_lemma(graph(), children, "puppy"));
  EXPECT_TRUE(any_has_lemma(graph(), children, "hunting dog"));
}

TEST(Hyponyms, LabradorIsNotAnImmediateHyponymOfDog) {
  // dog > hunting dog > sporting dog > retriever > Labrador retriever: the
  // breed is four levels down in WordNet 3.0.
  const auto& g = graph();
  auto dog = g.lookup("dog", PartOfSpeech::Noun).front();
  EXPECT_FALSE(any_has_lemma(g, g.hyponyms(dog), "labrador retriever"));
  auto lab = g.lookup("labrador retriever", PartOfSpeech::Noun).front();
  std::vector<SynsetId> chain{lab};
  while (chain.back() != dog && chain.size() < 10) chain.push_back(g.hypernyms(chain.back()).front());
  EXPECT_EQ(chain.size(), 5u);
}

TEST(Hyponyms, LeafHasNoneAndDualityHolds) {
  auto puppy = graph().lookup("puppy", PartOfSpeech::Noun).front();
  EXPECT_TRUE(graph().hyponyms(puppy).empty());
  for (const auto& parent : graph().hypernyms(puppy)) {
    auto children = graph().hyponyms(parent);
    EXPECT_NE(std::find(children.begin(), children.end(), puppy), children.end());
  }
}

TEST(Siblings, CarrotAndRadish) {
  auto senses = graph().lookup("carrot", PartOfSpeech::Noun);
  auto vegetable = std::find_if(senses.begin(), senses.end(), [](const SynsetId& id) {
    return any_has_lemma(graph(), graph().hypernyms(id), "root vegetable");
  });
  ASSERT_NE(vegetable, senses.end());
  EXPECT_TRUE(any_has_lemma(graph(), graph().siblings(*vegetable), "radish"));
}

TEST(Siblings, ExcludesSelfAndDeduplicates) {
  auto dog = graph().lookup("dog", PartOfSpeech::Noun).front();
  auto sibs = graph().siblings(dog);
  EXPECT_EQ(std::find(sibs.begin(), sibs.end(), dog), sibs.end());
  std::set<SynsetId> unique(sibs.begin(), sibs.end());
  EXPECT_EQ(unique.size(), sibs.size());
  EXPECT_TRUE(any_has_lemma(graph(), sibs, "wolf"));
}

TEST(Siblings, NoParentMeansNoSiblings) {
  EXPECT_TRUE(graph().siblings(graph().lookup("entity", PartOfSpeech::Noun).front()).empty());
}

TEST(Synonyms, TalkAndSpeak) { EXPECT_TRUE(contains(graph().synonyms("talk", PartOfSpeech::Verb), "speak")); }

TEST(Synonyms, SmallAndMinuscule) {
  auto syn = graph().synonyms("small", PartOfSpeech::Adjective);
  EXPECT_TRUE(contains(syn, "minuscule"));
  EXPECT_TRUE(contains(syn, "tiny"));
  EXPECT_EQ(syn.front(), "little");
  EXPECT_FALSE(contains(syn, "small"));
}

TEST(Synonyms, SeeIncludesWatchAndUsesSpaces) {
  auto syn = graph().synonyms("see", PartOfSpeech::Verb);
  EXPECT_TRUE(contains(syn, "watch"));
  EXPECT_TRUE(contains(syn, "get wind"));
  for (const auto& s : syn) EXPECT_EQ(s.find('_'), std::string::npos) << s;
}

TEST(Synonyms, AbsentWordAndUnsupportedPos) {
  EXPECT_TRUE(graph().synonyms("qzxv", PartOfSpeech::Verb).empty());
  try {
    graph().synonyms("dog", PartOfSpeech::Noun);
    FAIL() << "expected WordNetError";
  } catch (const WordNetError& e) {
    EXPECT_EQ(e.kind(), WordNetError::Kind::UnsupportedPos);
  }
  EXPECT_THROW(graph().synonyms("quickly", PartOfSpeech::Adverb), WordNetError);
}

// Independent oracle: hierarchy queries against a separate parse of data.noun.
class NounOracle : public ::testing::Test {
 protected:
  static const cfprobe::testing::PointerOracle& oracle() {
    static const cfprobe::testing::PointerOracle o(cfprobe::testing::wordnet_dir() / "data.noun");
    return o;
  }
};

TEST_F(NounOracle, ParsesTheSameSynsets) {
  EXPECT_EQ(oracle().offsets().size(), graph().synset_ids(PartOfSpeech::Noun).size());
}

TEST_F(NounOracle, FiftyRandomSynsetsAgree) {
  for (const auto& id : sample_nouns(50, 1234)) {
    ASSERT_TRUE(oracle().contains(id.offset));
    EXPECT_EQ(graph().synset(id).lemmas, oracle().lemmas(id.offset)) << to_string(id);
    EXPECT_EQ(graph().hypernyms(id), as_ids(oracle().hypernyms(id.offset))) << to_string(id);
    EXPECT_EQ(graph().hyponyms(id), as_ids(oracle().hyponyms(id.offset))) << to_string(id);
    auto hypo = graph().hyponyms(id);
    std::set<std::uint32_t> hypo_offsets;
    for (const auto& h : hypo) hypo_offsets.insert(h.offset);
    EXPECT_EQ(hypo_offsets, oracle().hyponyms_by_scan(id.offset)) << to_string(id);
    EXPECT_EQ(graph().siblings(id), as_ids(oracle().siblings(id.offset))) << to_string(id);
  }
}

TEST(Invariants, IndexRoundTripOnSample) {
  std::mt19937 rng(99);
  for (auto pos : {PartOfSpeech::Noun, PartOfSpeech::Verb, PartOfSpeech::Adjective, PartOfSpeech::Adverb}) {
    auto ids = graph().synset_ids(pos);
    std::vector<SynsetId> sample;
    std::sample(ids.begin(), ids.end(), std::back_inserter(sample), 100, rng);
    for (const auto& id : sample) {
      for (const auto& lemma : graph().synset(id).lemmas) {
        auto senses = graph().lookup(lemma, pos);
        EXPECT_NE(std::find(senses.begin(), senses.end(), id), senses.end()) << lemma << " " << to_string(id);
        for (const auto& s : senses) EXPECT_TRUE(has_lemma(graph(), s, display_lemma(lemma)));
      }
    }
  }
}

TEST(Invariants, HypernymHyponymDuality) {
  for (const auto& a : sample_nouns(200, 7)) {
    for (const auto& b : graph().hyponyms(a)) {
      auto up = graph().hypernyms(b);
      EXPECT_NE(std::find(up.begin(), up.end(), a), up.end()) << to_string(a) << " " << to_string(b);
    }
    for (const auto& b : graph().hypernyms(a)) {
      auto down = graph().hyponyms(b);
      EXPECT_NE(std::find(down.begin(), down.end(), a), down.end()) << to_string(a) << " " << to_string(b);
    }
  }
}

TEST(Invariants, SiblingSymmetry) {
  for (const auto& a : sample_nouns(100, 11)) {
    for (const auto& b : graph().siblings(a)) {
      auto back = graph().siblings(b);
      EXPECT_NE(std::find(back.begin(), back.end(), a), back.end()) << to_string(a) << " " << to_string(b);
    }
  }
}

TEST(Invariants, NoHypernymCycleWithinTwentyHops) {
  for (const auto& start : sample_nouns(300, 21)) {
    std::vector<SynsetId> frontier{start};
    for (int hop = 0; hop < 20 && !frontier.empty(); ++hop) {
      std::vector<SynsetId> next;
      for (const auto& id : frontier) {
        for (const auto& p : graph().hypernyms(id)) {
          ASSERT_NE(p, start) << "cycle through " << to_string(start);
          next.push_back(p);
        }
      }
      frontier = std::move(next);
    }
  }
}

TEST(Invariants, QueriesAreDeterministic) {
  const auto& g = graph();
  auto again = WordNetGraph::load(cfprobe::testing::wordnet_dir());
  for (const auto& id : sample_nouns(30, 5)) {
    EXPECT_EQ(g.hypernyms(id), again.hypernyms(id));
    EXPECT_EQ(g.hyponyms(id), again.hyponyms(id));
    EXPECT_EQ(g.siblings(id), again.siblings(id));
  }
  EXPECT_EQ(g.synonyms("see", PartOfSpeech::Verb), again.synonyms("see", PartOfSpeech::Verb));
}

TEST(DisplayLemma, LowercasesAndSpaces) {
  EXPECT_EQ(display_lemma("Canis_familiaris"), "canis familiaris");
  EXPECT_EQ(display_lemma("dog"), "dog");
}
