#include "uwar/hyperparams.hpp"

#include <cmath>
#include <stdexcept>

namespace uwar {

Hyperparams make_hyperparams(double delta, int p) {
  if (p < 1) throw std::invalid_argument("make_hyperparams: p must be >= 1");
  if (!(delta > 2.0 / 3.0 && delta < 1.0))
    throw std::invalid_argument(
        "make_hyperparams: requires 2/3 < delta < 1 (ensures a > p + 1)");
  Hyperparams hp;
  hp.delta = delta;
  hp.p = p;
  hp.n = 1.0 / (1.0 - delta);
  hp.a = delta * hp.n + p - 1;
  hp.b = 1;
  hp.k = (hp.n + p - 1) / (delta * hp.n + p - 1);
  const double k_alt = (delta * (1 - p) + p) / (delta * (2 - p) + p - 1);
  if (std::abs(hp.k - k_alt) > 1e-12 * std::abs(hp.k))
    throw std::logic_error("make_hyperparams: closed forms of k disagree");
  const double dn = delta * hp.n;
  hp.c = (dn - 1.0) / (hp.k * (dn - 2.0));
  return hp;
}

}  // namespace uwar
