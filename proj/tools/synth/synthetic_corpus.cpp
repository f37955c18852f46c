#include "synthetic_corpus.hpp"

#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

namespace chis::synth {

namespace {

const std::vector<std::string> kRelevantFillers = {
    "studies", "researchers", "patients", "doctors", "report", "evidence",
    "data", "trial", "experts", "results", "suggest", "found", "recent",
    "many", "people", "scientists", "review", "analysis", "clinical", "risk"};

const std::vector<std::string> kOffTopic = {
    "weather", "football", "recipe", "garden", "traffic", "music",
    "holiday", "kitchen", "market", "river", "painting", "train",
    "library", "mountain", "festival", "coffee", "museum", "bicycle",
    "election", "concert", "stadium", "orchestra", "harbor", "bakery"};

const std::vector<std::string> kFunctionWords = {"the", "of", "and", "in",
                                                 "that", "with", "for", "on"};

const std::vector<std::string> kPositive = {"good", "safe", "beneficial",
                                            "effective", "helpful", "healthy",
                                            "protective", "harmless"};

const std::vector<std::string> kNegative = {"bad", "harmful", "dangerous",
                                            "toxic", "risky", "deadly",
                                            "unsafe", "damaging"};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t below(std::size_t bound) {
    const std::uint64_t b = bound;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % b;
    std::uint64_t draw = engine_();
    while (draw >= limit) draw = engine_();
    return static_cast<std::size_t>(draw % b);
  }

  std::size_t between(std::size_t lo, std::size_t hi) {  // inclusive
    return lo + below(hi - lo + 1);
  }

  bool chance(double p) {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p;
  }

  const std::string& pick(const std::vector<std::string>& pool) {
    return pool[below(pool.size())];
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

std::string join_sentence(std::vector<std::string> words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') {
    out[0] = static_cast<char>(out[0] - 'a' + 'A');
  }
  out.push_back('.');
  return out;
}

std::string relevant_sentence(const Topic& topic, corpus::Stance stance, Rng& rng) {
  std::vector<std::string> words = topic.nouns;
  rng.shuffle(words);
  const std::size_t lo = std::min(words.size(), std::max<std::size_t>(2, (words.size() + 1) / 2));
  words.resize(rng.between(lo, words.size()));
  if (rng.chance(0.3)) words.push_back(rng.pick(topic.synonyms));

  const std::size_t n_fill = rng.between(2, 3);
  for (std::size_t i = 0; i < n_fill; ++i) words.push_back(rng.pick(kRelevantFillers));
  if (rng.chance(0.5)) words.push_back(rng.pick(kFunctionWords));
  const auto& pool = stance == corpus::Stance::Support ? kPositive : kNegative;
  const std::size_t n_sent = rng.between(2, 3);
  for (std::size_t i = 0; i < n_sent; ++i) words.push_back(rng.pick(pool));
  rng.shuffle(words);
  return join_sentence(std::move(words));
}

std::string irrelevant_sentence(Rng& rng) {
  std::vector<std::string> words;
  const std::size_t n = rng.between(5, 8);
  for (std::size_t i = 0; i < n; ++i) words.push_back(rng.pick(kOffTopic));
  const std::size_t n_func = rng.between(1, 2);
  for (std::size_t i = 0; i < n_func; ++i) words.push_back(rng.pick(kFunctionWords));
  rng.shuffle(words);
  return join_sentence(std::move(words));
}

}  // namespace

const std::vector<Topic>& default_topics() {
  static const std::vector<Topic> topics = {
      {"does_sun_exposure_cause_skin_cancer", "Does sun exposure cause skin cancer?",
       {"sun", "exposure", "skin", "cancer"}, {"melanoma", "sunlight"}},
      {"e-cigarettes", "Are e-cigarettes safer than normal cigarettes?",
       {"e-cigarettes", "cigarettes"}, {"vaping", "vapor"}},
      {"HRT_cause_cancer", "Does hormone replacement therapy cause cancer?",
       {"hormone", "replacement", "therapy", "cancer"}, {"estrogen", "menopause"}},
      {"MMR_vaccine_lead_to_autism", "Does the MMR vaccine lead to autism?",
       {"mmr", "vaccine", "autism"}, {"measles", "immunization"}},
      {"vitamin_C_common_cold", "Can vitamin C cure the common cold?",
       {"vitamin", "cold"}, {"ascorbic", "flu"}},
  };
  return topics;
}

const std::vector<std::size_t>& training_census() {
  static const std::vector<std::size_t> sizes = {68, 83, 61, 71, 65};
  return sizes;
}

const std::vector<std::size_t>& test_census() {
  static const std::vector<std::size_t> sizes = {342, 414, 260, 279, 247};
  return sizes;
}

std::vector<corpus::SentenceRecord> generate_corpus(const CorpusOptions& options) {
  const auto& topics = default_topics();
  if (options.sizes.size() != topics.size()) {
    throw std::invalid_argument("need one size per topic");
  }
  Rng rng(options.seed);
  std::vector<corpus::SentenceRecord> records;
  for (std::size_t t = 0; t < topics.size(); ++t) {
    const auto& topic = topics[t];
    for (std::size_t i = 0; i < options.sizes[t]; ++i) {
      corpus::SentenceRecord rec;
      rec.query_id = topic.query_id;
      rec.query_text = topic.query_text;
      if (rng.chance(options.relevant_fraction)) {
        const auto stance =
            rng.chance(0.5) ? corpus::Stance::Support : corpus::Stance::Oppose;
        rec.sentence_text = relevant_sentence(topic, stance, rng);
        rec.relevance = corpus::Relevance::Relevant;
        rec.stance = stance;
      } else {
        rec.sentence_text = irrelevant_sentence(rng);
        rec.relevance = corpus::Relevance::Irrelevant;
        rec.stance = corpus::Stance::Neutral;
      }
      records.push_back(std::move(rec));
    }
  }
  return records;
}

void write_lexicons(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  std::set<std::string> nouns;
  for (const auto& topic : default_topics()) {
    nouns.insert(topic.nouns.begin(), topic.nouns.end());
    nouns.insert(topic.synonyms.begin(), topic.synonyms.end());
  }
  for (const char* w : {"studies", "researchers", "patients", "doctors", "report",
                        "evidence", "data", "trial", "experts", "results",
                        "people", "scientists", "review", "analysis", "risk"}) {
    nouns.insert(w);
  }
  for (const auto& w : kOffTopic) nouns.insert(w);
  {
    std::ofstream out(dir / "nouns.txt");
    out << "# one lowercase noun per line\n";
    for (const auto& n : nouns) out << n << '\n';
  }

  {
    std::ofstream out(dir / "gloss.tsv");
    out << "# term<TAB>gloss\n";
    out << "melanoma\tMelanoma is a type of skin cancer. It develops from the "
           "pigment-producing cells known as melanocytes. Sun exposure is a "
           "major risk factor. It is treated surgically.\n";
    out << "sunlight\tSunlight is light emitted by the Sun. It reaches the "
           "skin as ultraviolet radiation. Daylight is another name.\n";
    out << "vaping\tVaping is the inhalation of aerosol from e-cigarettes. "
           "Devices heat a liquid. It became popular after 2010.\n";
    out << "vapor\tVapor is a substance in the gas phase. E-cigarettes "
           "produce it from liquid. It condenses when cooled.\n";
    out << "estrogen\tEstrogen is a sex hormone. It is used in hormone "
           "replacement therapy. The ovaries produce it.\n";
    out << "menopause\tMenopause ends menstruation. Hormone therapy can ease "
           "symptoms. It usually occurs around age fifty.\n";
    out << "measles\tMeasles is a viral disease. The MMR vaccine prevents "
           "it. It spreads easily.\n";
    out << "immunization\tImmunization makes a person immune to an infectious "
           "agent. A vaccine is the usual route. Programs reach millions.\n";
    out << "ascorbic\tAscorbic acid is vitamin C. It is found in citrus fruit. "
           "Deficiency causes scurvy.\n";
    out << "flu\tInfluenza or flu is an infectious disease. It resembles a "
           "cold but is more severe. Vaccines are available.\n";
    out << "festival\tA festival is an event celebrated by a community. Music "
           "is common. Many are annual.\n";
    out << "harbor\tA harbor is a sheltered body of water. Ships anchor there. "
           "Ports are built around them.\n";
  }

  {
    std::ofstream out(dir / "sentiment.tsv");
    out << "# term<TAB>positive<TAB>negative\n";
    const double pos_scores[] = {0.75, 0.625, 0.75, 0.625, 0.5, 0.625, 0.5, 0.5};
    for (std::size_t i = 0; i < kPositive.size(); ++i) {
      out << kPositive[i] << '\t' << pos_scores[i] << "\t0\n";
    }
    const double neg_scores[] = {0.75, 0.625, 0.75, 0.625, 0.5, 0.875, 0.625, 0.5};
    for (std::size_t i = 0; i < kNegative.size(); ++i) {
      out << kNegative[i] << "\t0\t" << neg_scores[i] << '\n';
    }
    // Second senses, averaged on load.
    out << "good\t0.5\t0\n";
    out << "bad\t0\t0.5\n";
    // Balanced and scoreless entries are neutral.
    out << "cold\t0.125\t0.125\n";
    out << "evidence\t0\t0\n";
  }
}

void write_dataset_file(const std::filesystem::path& path,
                        const std::vector<corpus::SentenceRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  corpus::write_dataset(out, records);
}

}  // namespace chis::synth
