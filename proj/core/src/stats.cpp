#include "perturb/stats.hpp"

#include <boost/math/distributions/beta.hpp>
#include <stdexcept>

namespace perturb {

BinomialCI clopper_pearson(uint64_t successes, uint64_t trials, double confidence) {
    if (trials == 0) return BinomialCI{0.0, 1.0};
    if (successes > trials) throw std::invalid_argument("clopper_pearson: successes > trials");
    const double alpha = 1.0 - confidence;
    double lo = 0.0, hi = 1.0;
    if (successes > 0) {
        boost::math::beta_distribution<double> dl(double(successes), double(trials - successes + 1));
        lo = boost::math::quantile(dl, alpha / 2);
    }
    if (successes < trials) {
        boost::math::beta_distribution<double> dh(double(successes + 1), double(trials - successes));
        hi = boost::math::quantile(dh, 1 - alpha / 2);
    }
    return BinomialCI{lo, hi};
}

}  // namespace perturb
