// Minimal end-to-end walk: synthesize an antenna, draw a channel, and compare
// a random coder against SEBO and the exhaustive optimum on the SISO gain.

#include <cstdio>
#include <memory>

#include "pixelcode/antenna.hpp"
#include "pixelcode/channel.hpp"
#include "pixelcode/optimize.hpp"

int main() {
  using namespace pixelcode;
  const int q = 10, k = 8;
  auto antenna = std::make_shared<const AntennaModel>(synthesize_antenna(q, k, 7));
  auto channel = std::make_shared<const VirtualChannel>(sample_virtual_channel(k, 42));
  auto inst = std::make_shared<const SisoInstance>(channel, antenna);
  const Objective obj = make_siso_objective(inst);

  const SearchResult rnd = random_baseline(obj, 1);
  const SearchResult blocks = sebo(obj, 5);
  const SearchResult full = exhaustive_search(obj);

  std::printf("random      gain %.6f  (1 eval)\n", rnd.best_value);
  std::printf("sebo(5)     gain %.6f  (%llu evals)\n", blocks.best_value,
              static_cast<unsigned long long>(blocks.evaluations));
  std::printf("exhaustive  gain %.6f  (%llu evals)\n", full.best_value,
              static_cast<unsigned long long>(full.evaluations));
  std::printf("sebo/exhaustive ratio %.4f\n", blocks.best_value / full.best_value);
  return 0;
}
