// Writes random ILP instances as LP files with the exact objective of each,
// for comparison against an external MILP solver.

#include <cstdio>
#include <filesystem>
#include <random>
#include <string>

#include "morphforest/ilp.hpp"
#include "morphforest/io.hpp"
#include "oracles.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: lp_dump <out-dir>\n");
    return 1;
  }
  const std::filesystem::path dir = argv[1];
  std::filesystem::create_directories(dir);
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> a(0.0, 0.05), b(0.0, 2.0);
  std::string index;
  for (int i = 0; i < 20; ++i) {
    auto inst = oracle::random_instance(rng, 2 + rng() % 30, 1 + rng() % 8);
    inst.alpha = a(rng);
    inst.beta = b(rng);
    const auto name = "instance_" + std::to_string(i) + ".lp";
    morphforest::export_lp(inst, dir / name);
    const auto sol = morphforest::solve_exact(inst);
    index += name + "\t" + morphforest::io::format_double(sol.objective) + "\n";
  }
  morphforest::io::write_file(dir / "objectives.tsv", index);
  return 0;
}
