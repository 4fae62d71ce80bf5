#include "recomb/fisher.hpp"

#include <algorithm>
#include <cmath>

#include "recomb/error.hpp"
#include "recomb/kernel.hpp"

namespace recomb {

double fisher_nonlinear(const Distribution& p, const RecombinationMeasure& nu) {
  const CollisionOperator op(p.shape(), nu);
  double d = 0.0;
  std::vector<double> pa, pc;
  op.for_each_atom([&](const Atom& atom, const std::vector<std::uint32_t>& ta, const std::vector<std::uint32_t>& tc) {
    pa.assign(static_cast<std::size_t>(*std::max_element(ta.begin(), ta.end())) + 1, 0.0);
    pc.assign(static_cast<std::size_t>(*std::max_element(tc.begin(), tc.end())) + 1, 0.0);
    for (std::size_t c = 0; c < p.size(); ++c) {
      pa[ta[c]] += p[c];
      pc[tc[c]] += p[c];
    }
    double s = 0.0;
    for (std::size_t c = 0; c < p.size(); ++c) {
      const double prod = pa[ta[c]] * pc[tc[c]];
      if (prod <= 0.0 && p[c] <= 0.0) continue;
      if (p[c] <= 0.0 || prod <= 0.0)
        fail(Error::Kind::invalid_argument, "analysis", "support of p differs from that of its recombined marginals");
      s += (prod - p[c]) * std::log(prod / p[c]);
    }
    d -= atom.p * s;
  });
  return d;
}

}  // namespace recomb
