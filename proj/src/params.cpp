#include "subfourier/params.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "subfourier/errors.hpp"

namespace subfourier {

AliasingError::AliasingError(double time, double edge_population)
    : NumericalError([&] {
          std::ostringstream os;
          os << "aliasing guard tripped at t=" << time
             << ": edge population " << edge_population;
          return os.str();
      }()),
      time_(time),
      edge_population_(edge_population) {}

std::string to_string(DriveMode mode) {
    switch (mode) {
        case DriveMode::single: return "single";
        case DriveMode::two_train: return "two-train";
        case DriveMode::modulated: return "modulated";
    }
    return "unknown";
}

DriveMode parse_drive_mode(const std::string& text) {
    if (text == "single") return DriveMode::single;
    if (text == "two-train" || text == "two_train") return DriveMode::two_train;
    if (text == "modulated") return DriveMode::modulated;
    throw ConfigError("mode: unknown drive mode '" + text + "'");
}

namespace {

void require(bool ok, const char* field, const std::string& what) {
    if (!ok) throw ConfigError(std::string(field) + ": " + what);
}

}  // namespace

void SimParams::validate() const {
    require(std::isfinite(K) && K >= 0.0, "K", "must be >= 0");
    require(std::isfinite(hbar_eff) && hbar_eff > 0.0, "hbar_eff", "must be > 0");
    require(std::isfinite(r) && r > 0.0, "r", "must be > 0");
    require(std::isfinite(phi) && phi >= 0.0 && phi < two_pi, "phi",
            "must lie in [0, 2pi)");
    require(std::isfinite(tau) && tau >= 0.0 && tau < 1.0 / std::max(1.0, r), "tau",
            "must satisfy 0 <= tau < 1/max(1, r)");
    require(N1 >= 1, "N1", "must be >= 1");
    require(!N2 || *N2 >= 0, "N2", "must be >= 0");
    require(std::isfinite(A) && A >= 0.0 && A <= 1.0, "A", "must lie in [0, 1]");
    require(std::isfinite(modulation_phase), "modulation_phase", "must be finite");
    require(grid_size >= 64 && grid_size % 2 == 0, "grid_size", "must be even and >= 64");
    require(beta_samples >= 1, "beta_samples", "must be >= 1");
    require(std::isfinite(sigma_P) && sigma_P >= 0.0, "sigma_P", "must be >= 0");
}

int SimParams::resolved_N2() const {
    if (N2) return *N2;
    // The tolerance keeps r*N1 = 11.000000000000002 from admitting a kick at N1.
    const double bound = r * N1 - phi / two_pi;
    return std::max(0, static_cast<int>(std::ceil(bound - 1e-9)) - 1);
}

}  // namespace subfourier
