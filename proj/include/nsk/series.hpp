#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace nsk {

/// Truncation policy shared by every infinite series in the library.
/// A series either converges (two consecutive partial-sum deltas below
/// abs_tol) or raises SeriesError; a truncated value is never returned
/// silently.
struct SeriesControl {
    double abs_tol = 1e-12;
    int max_terms = 500;

    void validate() const {
        if (!(abs_tol > 0.0))
            throw std::invalid_argument("SeriesControl: abs_tol must be > 0");
        if (max_terms < 1)
            throw std::invalid_argument("SeriesControl: max_terms must be >= 1");
    }
};

/// Non-convergence of a truncated series. Carries the partial sum and the
/// number of terms consumed so callers can report how far the sum got.
class SeriesError : public std::runtime_error {
public:
    SeriesError(const std::string& what, double partial_sum, int terms_used)
        : std::runtime_error(what + " (partial sum " + std::to_string(partial_sum) +
                             " after " + std::to_string(terms_used) + " terms)"),
          partial_sum_(partial_sum),
          terms_used_(terms_used) {}

    double partial_sum() const noexcept { return partial_sum_; }
    int terms_used() const noexcept { return terms_used_; }

private:
    double partial_sum_;
    int terms_used_;
};

} // namespace nsk
