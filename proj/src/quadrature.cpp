#include "stokeslab/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

namespace stokeslab {

const GaussRule& gl16() {
    static const GaussRule rule = [] {
        using G = boost::math::quadrature::gauss<double, 16>;
        const auto& xs = G::abscissa();
        const auto& ws = G::weights();
        GaussRule r;
        for (std::size_t i = xs.size(); i-- > 0;) {
            r.x.push_back(-xs[i]);
            r.w.push_back(ws[i]);
        }
        for (std::size_t i = 0; i < xs.size(); ++i) {
            r.x.push_back(xs[i]);
            r.w.push_back(ws[i]);
        }
        return r;
    }();
    return rule;
}

}  // namespace stokeslab
