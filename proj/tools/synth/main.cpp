// Writes a synthetic labeled corpus plus lexicons for demos and tests.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "synthetic_corpus.hpp"

int main(int argc, char** argv) {
  CLI::App app{"chis-synth: generate a synthetic consumer-health corpus"};
  std::filesystem::path dir;
  std::uint64_t seed = 0;
  std::vector<std::size_t> train_sizes = chis::synth::training_census();
  std::vector<std::size_t> test_sizes = chis::synth::test_census();
  app.add_option("--out-dir", dir, "Output directory")->required();
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--train-sizes", train_sizes, "Sentences per query (5 values)")
      ->delimiter(',')
      ->expected(5);
  app.add_option("--test-sizes", test_sizes, "Sentences per query (5 values)")
      ->delimiter(',')
      ->expected(5);
  CLI11_PARSE(app, argc, argv);

  try {
    chis::synth::write_lexicons(dir);
    const auto train = chis::synth::generate_corpus({train_sizes, seed, 0.5});
    const auto test = chis::synth::generate_corpus({test_sizes, seed + 1, 0.5});
    chis::synth::write_dataset_file(dir / "train.csv", train);
    chis::synth::write_dataset_file(dir / "test.csv", test);
    std::cout << "wrote " << train.size() << " training and " << test.size()
              << " test sentences plus lexicons to " << dir.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
