#pragma once

#include <cstdint>

namespace perturb {

struct BinomialCI {
    double lo, hi;
};

/// Two-sided Clopper-Pearson interval for a binomial proportion.
BinomialCI clopper_pearson(uint64_t successes, uint64_t trials, double confidence);

}  // namespace perturb
