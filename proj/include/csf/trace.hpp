#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace csf {

enum class Provenance { analytic, numeric, external };

inline const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::analytic: return "analytic";
        case Provenance::numeric: return "numeric";
        case Provenance::external: return "external";
    }
    return "unknown";
}

/// Sampled (time, pressure) series. Times strictly increasing, pressures
/// finite, equal lengths.
struct PressureTrace {
    std::vector<double> times;      // min
    std::vector<double> pressures;  // mmH2O
    Provenance provenance = Provenance::numeric;
    std::string scenario_id;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }

    void validate() const {
        if (times.size() != pressures.size())
            throw std::invalid_argument("PressureTrace: times and pressures differ in length");
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (!std::isfinite(times[i]) || !std::isfinite(pressures[i]))
                throw std::invalid_argument("PressureTrace: non-finite sample at index " +
                                            std::to_string(i));
            if (i > 0 && !(times[i] > times[i - 1]))
                throw std::invalid_argument(
                    "PressureTrace: times not strictly increasing at index " + std::to_string(i));
        }
    }
};

}  // namespace csf
