#include "clustsig/rng.hpp"

#include "clustsig/special.hpp"

namespace clustsig {

double Rng::normal() { return norm_quantile(uniform01_open()); }

}  // namespace clustsig
