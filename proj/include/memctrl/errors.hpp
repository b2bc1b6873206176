#ifndef MEMCTRL_ERRORS_HPP
#define MEMCTRL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace memctrl {

struct PoleError : std::domain_error {
    explicit PoleError(const std::string& what) : std::domain_error(what) {}
};

struct NotConverged : std::runtime_error {
    NotConverged(const std::string& what, int terms, double last)
        : std::runtime_error(what), terms_used(terms), last_term(last) {}
    int terms_used;
    double last_term;
};

struct RouteDisagreement : std::runtime_error {
    RouteDisagreement(const std::string& what, double series, double contour, double rel)
        : std::runtime_error(what), series_value(series), contour_value(contour), rel_diff(rel) {}
    double series_value;
    double contour_value;
    double rel_diff;
};

struct BranchCutError : std::domain_error {
    explicit BranchCutError(const std::string& what) : std::domain_error(what) {}
};

struct SingularSymbol : std::runtime_error {
    explicit SingularSymbol(const std::string& what) : std::runtime_error(what) {}
};

struct ContourIntersectsBranchCut : std::domain_error {
    explicit ContourIntersectsBranchCut(const std::string& what) : std::domain_error(what) {}
};

struct NonConvergedQuadrature : std::runtime_error {
    NonConvergedQuadrature(const std::string& what, double disagreement)
        : std::runtime_error(what), disagreement(disagreement) {}
    double disagreement;
};

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string& what) : std::invalid_argument(what) {}
};

struct MomentIntegralFailure : std::runtime_error {
    explicit MomentIntegralFailure(const std::string& what) : std::runtime_error(what) {}
};

struct StepSingular : std::runtime_error {
    explicit StepSingular(const std::string& what) : std::runtime_error(what) {}
};

struct GridIncompatible : std::invalid_argument {
    explicit GridIncompatible(const std::string& what) : std::invalid_argument(what) {}
};

struct SubIterationDiverged : std::runtime_error {
    SubIterationDiverged(const std::string& what, double t, double residual)
        : std::runtime_error(what), t_failed(t), last_residual(residual) {}
    double t_failed;
    double last_residual;
};

struct QuadratureNotConverged : std::runtime_error {
    explicit QuadratureNotConverged(const std::string& what) : std::runtime_error(what) {}
};

struct FixedPointDiverged : std::runtime_error {
    FixedPointDiverged(const std::string& what, double residual)
        : std::runtime_error(what), last_residual(residual) {}
    double last_residual;
};

struct PicardNotConverged : std::runtime_error {
    PicardNotConverged(const std::string& what, int iters, double update)
        : std::runtime_error(what), iterations(iters), last_update(update) {}
    int iterations;
    double last_update;
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line, int column)
        : std::runtime_error(what), line(line), column(column) {}
    int line;
    int column;
};

struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace memctrl

#endif  // MEMCTRL_ERRORS_HPP
