#include "tsbc/params.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace tsbc {

ParamSet lvl1_default() {
    ParamSet ps;
    ps.log2_q = 32;
    ps.n = 1024;
    ps.k = 1;
    ps.sigma = std::ldexp(1.0, -25);
    ps.p = 2;
    return ps;
}

ParamSet validate(const ParamSet& ps) {
    if (ps.log2_q < 1 || ps.log2_q > 32)
        throw std::invalid_argument("params: log2_q must be in 1..32");
    if (ps.n == 0 || !std::has_single_bit(ps.n))
        throw std::invalid_argument("params: N must be a power of two");
    if (ps.k != 1)
        throw std::invalid_argument("params: k must be 1");
    if (ps.p == 0 || !std::has_single_bit(ps.p))
        throw std::invalid_argument("params: p must be a power of two");
    if (ps.p > ps.q() || ps.q() % ps.p != 0)
        throw std::invalid_argument("params: p must divide q");
    if (ps.delta() * ps.p != ps.q())
        throw std::invalid_argument("params: delta * p != q");
    if (!std::isfinite(ps.sigma) || !(ps.sigma_q() >= 1.0))
        throw std::invalid_argument("params: sigma * q must be >= 1 and finite");
    return ps;
}

}  // namespace tsbc
