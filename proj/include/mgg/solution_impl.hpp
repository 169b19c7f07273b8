#pragma once

#include <json.hpp>

#include "mgg/solutions.hpp"

namespace mgg {

/// Backend interface for ExteriorSolution. Implementations are immutable
/// after construction.
class SolutionImpl {
  public:
    SolutionImpl(TauParams tau, double c0, double r_min, double r_max)
        : tau_(tau), c0_(c0), r_min_(r_min), r_max_(r_max) {}
    virtual ~SolutionImpl() = default;

    virtual EvalResult eval_impl(const Vec2& x) const = 0;
    virtual nlohmann::json descriptor() const = 0;

    TauParams tau_;
    double c0_;
    double r_min_;
    double r_max_;
    std::optional<ExpansionCoeffs> truth_;
};

}  // namespace mgg
