#ifndef MEMCTRL_CONFIG_HPP
#define MEMCTRL_CONFIG_HPP

#include <string>
#include <vector>

#include "memctrl/control.hpp"

namespace memctrl {

// zeta / zeta1 presets: single_mode(m), decaying(c, rate), or explicit coefficients.
struct StateSpec {
    enum class Kind { SingleMode, Decaying, Explicit };
    Kind kind = Kind::SingleMode;
    int mode = 1;
    double c = 1.0;
    double rate = 1.0;
    std::vector<double> coefficients;

    static StateSpec parse(const std::string& text);   // "single_mode(1)" etc.
    static StateSpec explicit_coeffs(const std::vector<double>& coeffs);
    Vector build(int modes) const;
    std::string describe() const;
};

struct ScenarioConfig {
    // [kernel]
    double alpha = 1.0;
    double beta = 0.5;
    double nu = 0.5;
    // [system]
    int modes = 8;
    int grid_points = 513;
    double p = 2.0;
    // [time]
    double T = 1.0;
    int steps = 256;
    std::string grid_kind = "uniform";
    double grading = 0.0;  // 0: auto (2/nu) when graded
    // [control]
    std::string operator_kind = "identity";  // identity | paper_kernel | greens_diagonal
    int kill_mode = 0;                       // > 0: zero that row/col of the identity B
    std::vector<double> lambda_sequence = {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    // [problem]
    StateSpec zeta;
    StateSpec zeta1{StateSpec::Kind::Decaying, 1, 1.0, 1.0, {}};
    // [nonlinearity]
    std::string nonlinearity_kind = "zero";  // zero | sine_cosine | exp_decay_linear
    double k0 = 0.1;
    double mu = 0.05;
    // [outputs]
    std::string directory = "out";
    std::string formats = "both";  // csv | json | both

    MemoryKernel kernel() const { return MemoryKernel(alpha, beta, nu); }
    SpectralSystem system() const { return SpectralSystem(modes, grid_points, p); }
    TimeGrid time_grid() const;
    ControlOperator control_op(const SpectralSystem& sys) const;
    Nonlinearity nonlinearity() const;
};

/// Parse + validate a TOML config file (subset: sections, scalar and array
/// values, # comments). Unknown keys are rejected; every domain constraint
/// is re-checked with the offending key named.
ScenarioConfig parse_config(const std::string& path);
ScenarioConfig parse_config_text(const std::string& text);

}  // namespace memctrl

#endif  // MEMCTRL_CONFIG_HPP
