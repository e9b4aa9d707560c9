#include "iop/cli/fixtures.hpp"

namespace iop::cli {

RationalMatrix benchmark_plant(const RationalFunction& v, const RationalFunction& u, Domain domain) {
  RationalMatrix G(5, 5, domain);
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) G(i, j) = (j == 1 || (j == 4 && i == 4)) ? u : v;
  return G;
}

RationalMatrix discrete_benchmark_plant() {
  return benchmark_plant(RationalFunction(Polynomial{0.1}, Polynomial{-0.5, 1.0}),
                         RationalFunction(Polynomial{1.0}, Polynomial{-2.0, 1.0}), Domain::discrete);
}

RationalMatrix continuous_benchmark_plant() {
  return benchmark_plant(RationalFunction(Polynomial{1.0}, Polynomial{1.0, 1.0}),
                         RationalFunction(Polynomial{1.0}, Polynomial{-1.0, 1.0}), Domain::continuous);
}

SparsityPattern benchmark_pattern() { return SparsityPattern::lower_triangular(5); }

RationalMatrix continuous_reference_controller() {
  const RationalFunction gain(Polynomial{8.0}, Polynomial{7.0, 1.0});
  RationalMatrix K(5, 5, Domain::continuous);
  K(1, 1) = gain * -2.0;
  K(3, 1) = gain;
  // 2 (s + 5)(s + 3) / ((s + 1)(s + 7)) = (2 s^2 + 16 s + 30) / (s^2 + 8 s + 7)
  K(4, 1) = gain * RationalFunction(Polynomial{30.0, 16.0, 2.0}, Polynomial{7.0, 8.0, 1.0});
  K(4, 4) = gain * -2.0;
  return K;
}

}  // namespace iop::cli
