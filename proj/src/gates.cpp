#include "qmediate/gates.hpp"

#include <algorithm>
#include <cmath>

namespace qmediate {

Gate2 identity_gate() {
    return Gate2{{cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(1, 0)}};
}

Gate2 pauli_x_gate() {
    return Gate2{{cplx(0, 0), cplx(1, 0), cplx(1, 0), cplx(0, 0)}};
}

Gate2 rx_gate(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return Gate2{{cplx(c, 0), cplx(0, -s), cplx(0, -s), cplx(c, 0)}};
}

Gate2 ry_gate(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return Gate2{{cplx(c, 0), cplx(-s, 0), cplx(s, 0), cplx(c, 0)}};
}

Gate2 rz_gate(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return Gate2{{cplx(c, -s), cplx(0, 0), cplx(0, 0), cplx(c, s)}};
}

double unitarity_defect(const Gate2& g) {
    // G^dagger G entry by entry against the identity.
    double worst = 0.0;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            cplx sum(0, 0);
            for (int k = 0; k < 2; ++k) {
                sum += std::conj(g.at(k, r)) * g.at(k, c);
            }
            const cplx target = (r == c) ? cplx(1, 0) : cplx(0, 0);
            worst = std::max(worst, std::abs(sum - target));
        }
    }
    return worst;
}

} // namespace qmediate
