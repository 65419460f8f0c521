#include "scoredec/scoring.hpp"

#include <cmath>
#include <sstream>

#include "scoredec/errors.hpp"

namespace scoredec {

namespace {

void require_qlike_domain(const ScoringSpec& spec, double x, double y) {
    if (!(x > spec.domain_floor) || !(y > spec.domain_floor)) {
        std::ostringstream msg;
        msg << "QLIKE requires arguments above " << spec.domain_floor << ", got x=" << x
            << ", y=" << y;
        throw InputError(msg.str());
    }
}

[[noreturn]] void not_smooth(const char* what) {
    throw UnsupportedOperation(std::string(what) + " is undefined for the non-smooth check loss");
}

}  // namespace

ScoringSpec ScoringSpec::squared_error() { return {Functional::Mean, LossFamily::SquaredError, 0.5, 1e-12}; }

ScoringSpec ScoringSpec::qlike(double domain_floor) {
    return {Functional::Mean, LossFamily::QLike, 0.5, domain_floor};
}

ScoringSpec ScoringSpec::check_loss(double alpha) {
    ScoringSpec s{Functional::Quantile, LossFamily::CheckLoss, alpha, 1e-12};
    s.validate();
    return s;
}

void ScoringSpec::validate() const {
    switch (family) {
        case LossFamily::SquaredError:
        case LossFamily::QLike:
            if (functional != Functional::Mean)
                throw InputError(name() + " is only consistent for the mean functional");
            if (family == LossFamily::QLike && !(domain_floor >= 0.0))
                throw InputError("QLIKE domain floor must be non-negative");
            break;
        case LossFamily::CheckLoss:
            if (functional != Functional::Quantile)
                throw InputError("check loss requires the quantile functional");
            if (!(level > 0.0 && level < 1.0))
                throw InputError("quantile level must lie in (0, 1)");
            break;
    }
}

std::string ScoringSpec::name() const {
    switch (family) {
        case LossFamily::SquaredError: return "SE";
        case LossFamily::QLike: return "QLIKE";
        case LossFamily::CheckLoss: {
            std::ostringstream s;
            s << "check(" << level << ")";
            return s.str();
        }
    }
    return "?";
}

double score(const ScoringSpec& spec, double x, double y) {
    switch (spec.family) {
        case LossFamily::SquaredError: {
            const double d = x - y;
            return d * d;
        }
        case LossFamily::QLike: {
            require_qlike_domain(spec, x, y);
            const double r = y / x;
            return r - std::log(r) - 1.0;
        }
        case LossFamily::CheckLoss:
            return ((y <= x ? 1.0 : 0.0) - spec.level) * (x - y);
    }
    return 0.0;
}

double score_d1(const ScoringSpec& spec, double x, double y) {
    switch (spec.family) {
        case LossFamily::SquaredError: return 2.0 * (x - y);
        case LossFamily::QLike: require_qlike_domain(spec, x, y); return (x - y) / (x * x);
        case LossFamily::CheckLoss: not_smooth("score_d1");
    }
    return 0.0;
}

double score_d2(const ScoringSpec& spec, double x, double y) {
    switch (spec.family) {
        case LossFamily::SquaredError: return 2.0;
        case LossFamily::QLike: require_qlike_domain(spec, x, y); return (2.0 * y - x) / (x * x * x);
        case LossFamily::CheckLoss: not_smooth("score_d2");
    }
    return 0.0;
}

double identification(const ScoringSpec& spec, double x, double y) {
    if (spec.functional == Functional::Mean) return 2.0 * (x - y);
    return (y <= x ? 1.0 : 0.0) - spec.level;
}

}  // namespace scoredec
