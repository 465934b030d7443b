#include "zgt2/synthetic.hpp"

#include <cmath>

#include "zgt2/rng.hpp"

namespace zgt2 {

Table make_heteroscedastic_sine(std::size_t n, std::uint64_t seed) {
  Table t;
  t.feature_names = {"x"};
  t.target_name = "y";
  t.features = Matrix(0, 1);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(-4.0, 4.0);
    const double y = std::sin(x) + 0.15 * std::abs(x) * rng.normal();
    const double row[] = {x};
    t.features.append_row(row);
    t.targets.push_back(y);
  }
  return t;
}

}  // namespace zgt2
