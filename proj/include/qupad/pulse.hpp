// Copyright 2026 The QuPAD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "qupad/circuit.hpp"
#include "qupad/errors.hpp"

namespace qupad {

/// AWG length granularity in dt ticks.
inline constexpr std::int64_t kDurationQuantum = 16;

inline constexpr double kDsrMin = 0.6;
inline constexpr double kDsrMax = 1.5;

/// Duration stretch ratio: stretched duration over original duration at fixed pulse area.
class Dsr {
   public:
    Dsr() = default;
    explicit Dsr(double v) : value_(v) {
        if (!(v >= kDsrMin && v <= kDsrMax)) {
            throw ArgumentError("dsr " + std::to_string(v) + " outside [0.6, 1.5]");
        }
    }
    double value() const { return value_; }
    auto operator<=>(const Dsr &) const = default;

   private:
    double value_ = 1.0;
};

/// Flat-top pulse with Gaussian flanks. `amplitude` is the magnitude; the sign of the drive
/// is carried by `phase` (radians). All lengths are in dt ticks.
struct GaussianSquarePulse {
    double amplitude = 0.0;
    double phase = 0.0;
    double sigma = 64.0;
    double width = 0.0;
    double risefall = 128.0;

    double duration() const { return width + 2.0 * risefall; }
    bool operator==(const GaussianSquarePulse &) const = default;
};

inline void check_pulse(const GaussianSquarePulse &p) {
    if (!(p.sigma > 0.0)) {
        throw ArgumentError("pulse sigma must be positive");
    }
    if (p.width < 0.0 || p.risefall < 0.0) {
        throw ArgumentError("pulse width and risefall must be non-negative");
    }
    if (p.amplitude < 0.0 || p.amplitude > 1.0) {
        throw ArgumentError("pulse amplitude magnitude must lie in [0, 1]");
    }
}

/// Area of both Gaussian flanks for unit amplitude: sqrt(2 pi) sigma erf(rf / (sqrt(2) sigma)).
inline double flank_area(double sigma, double risefall) {
    return std::sqrt(2.0 * std::numbers::pi) * sigma * std::erf(risefall / (std::numbers::sqrt2 * sigma));
}

/// Calibration area |A| [w + sqrt(2 pi) sigma erf(rf / (sqrt(2) sigma))].
///
/// This closed form integrates the unlifted flanks. The sampled waveform subtracts the
/// flank value one tick before the pulse starts (see lifted_area), so the two differ by
/// roughly the baseline fraction exp(-(rf+1)^2 / (2 sigma^2)) of the flank area.
inline double pulse_area(const GaussianSquarePulse &p) {
    check_pulse(p);
    return p.amplitude * (p.width + flank_area(p.sigma, p.risefall));
}

/// Flank value one tick outside the pulse, f'(-1), which the waveform subtracts as baseline.
inline double baseline_lift(double sigma, double risefall) {
    const double d = (risefall + 1.0) / sigma;
    return std::exp(-0.5 * d * d);
}

/// Lifted waveform A (f'(x) - f'(-1)) / (1 - f'(-1)) on [0, duration).
inline double lifted_waveform(const GaussianSquarePulse &p, double x) {
    if (x < 0.0 || x >= p.duration()) {
        return 0.0;
    }
    const double c = p.risefall > 0.0 ? baseline_lift(p.sigma, p.risefall) : 0.0;
    double f = 1.0;
    if (x < p.risefall) {
        const double d = (x - p.risefall) / p.sigma;
        f = std::exp(-0.5 * d * d);
    } else if (x >= p.risefall + p.width) {
        const double d = (x - (p.risefall + p.width)) / p.sigma;
        f = std::exp(-0.5 * d * d);
    }
    return p.amplitude * (f - c) / (1.0 - c);
}

/// Exact integral of lifted_waveform over [0, duration).
inline double lifted_area(const GaussianSquarePulse &p) {
    check_pulse(p);
    if (p.risefall == 0.0) {
        return p.amplitude * p.width;
    }
    const double c = baseline_lift(p.sigma, p.risefall);
    const double one_flank = 0.5 * flank_area(p.sigma, p.risefall);
    return p.amplitude * (p.width + 2.0 * (one_flank - c * p.risefall) / (1.0 - c));
}

/// Area that realizes Rzx(theta) given the area alpha_star of the CNOT-calibrated tone:
/// alpha(theta) = theta alpha_star / (pi/2). Requires 0 < theta <= pi/2.
inline double area_for_theta(double theta, double alpha_star) {
    if (!(theta > 0.0 && theta <= kHalfPi + 1e-12)) {
        throw ContractViolation("area_for_theta expects theta in (0, pi/2], got " + std::to_string(theta));
    }
    return std::min(theta, kHalfPi) * alpha_star / kHalfPi;
}

/// Cross-resonance tone for Rzx(theta), derived from the pair's calibrated tone `base`.
///
/// The width shrinks first (sigma, risefall and amplitude unchanged); only once the flat
/// top is gone does the amplitude shrink. theta = pi/2 returns `base` unchanged.
inline GaussianSquarePulse rzx_base_pulse(double theta, const GaussianSquarePulse &base) {
    check_pulse(base);
    if (!(theta > 0.0 && theta <= kHalfPi + 1e-12)) {
        throw ContractViolation("rzx_base_pulse expects theta in (0, pi/2]; normalize the angle first");
    }
    if (theta >= kHalfPi) {
        return base;
    }
    const double target = area_for_theta(theta, pulse_area(base));
    const double flanks = flank_area(base.sigma, base.risefall);
    GaussianSquarePulse p = base;
    const double width = target / base.amplitude - flanks;
    if (width >= 0.0) {
        p.width = width;
    } else {
        p.width = 0.0;
        p.amplitude = target / flanks;
    }
    return p;
}

/// Rounds a duration to the nearest multiple of kDurationQuantum, halves rounding up.
/// Never returns less than one quantum.
inline std::int64_t quantize_duration(double duration) {
    const double q = static_cast<double>(kDurationQuantum);
    // The small bias keeps exact halves such as 328 / 16 from rounding down after
    // an inexact multiplication.
    const auto count = static_cast<std::int64_t>(std::floor(duration / q + 0.5 + 1e-9));
    return std::max<std::int64_t>(count, 1) * kDurationQuantum;
}

/// Area-preserving stretch of `p` by `ratio`.
///
/// The new duration is quantized to a multiple of 16 dt, giving the realized ratio
/// rdsr = duration_1 / duration_0. Width, risefall and sigma scale by rdsr and the
/// amplitude is chosen so the lifted waveform keeps its area. Throws AmplitudeSaturation
/// when that amplitude would exceed 1.
inline GaussianSquarePulse stretch_pulse(const GaussianSquarePulse &p, double ratio) {
    check_pulse(p);
    if (!(ratio > 0.0)) {
        throw ArgumentError("stretch ratio must be positive");
    }
    const double d0 = p.duration();
    if (d0 <= 0.0) {
        throw ArgumentError("cannot stretch a zero-length pulse");
    }
    const auto d1 = static_cast<double>(quantize_duration(d0 * ratio));
    if (d1 == d0) {
        return p;
    }
    const double rdsr = d1 / d0;
    GaussianSquarePulse out = p;
    out.risefall = rdsr * p.risefall;
    out.sigma = rdsr * p.sigma;
    out.width = std::max(0.0, d1 - 2.0 * out.risefall);
    GaussianSquarePulse unit0 = p;
    unit0.amplitude = 1.0;
    GaussianSquarePulse unit1 = out;
    unit1.amplitude = 1.0;
    out.amplitude = p.amplitude * lifted_area(unit0) / lifted_area(unit1);
    if (out.amplitude > 1.0) {
        throw AmplitudeSaturation("stretch by " + std::to_string(ratio) + " needs amplitude " +
                                  std::to_string(out.amplitude) + " > 1");
    }
    return out;
}

inline GaussianSquarePulse stretch_pulse(const GaussianSquarePulse &p, Dsr dsr) { return stretch_pulse(p, dsr.value()); }

/// Pulse channel: a qubit's drive line or the cross-resonance line of a coupling pair.
struct Channel {
    enum class Kind : std::uint8_t { Drive, Control };
    Kind kind = Kind::Drive;
    int qubit = 0;     // drive qubit, or control qubit of the pair
    int target = -1;   // target qubit for control channels

    static Channel drive(int q) { return {Kind::Drive, q, -1}; }
    static Channel control(QubitPair p) { return {Kind::Control, p.control, p.target}; }

    std::string name() const {
        return kind == Kind::Drive ? "d" + std::to_string(qubit)
                                   : "u" + std::to_string(qubit) + "-" + std::to_string(target);
    }
    auto operator<=>(const Channel &) const = default;
};

/// Fixed single-qubit pulse; only its length matters to the schedule.
struct SqPulse {
    std::string label;
    std::int64_t duration = 160;
    bool operator==(const SqPulse &) const = default;
};

struct PulseInstruction {
    Channel channel;
    std::int64_t start = 0;
    std::variant<GaussianSquarePulse, SqPulse> payload;

    std::int64_t duration() const {
        if (const auto *gs = std::get_if<GaussianSquarePulse>(&payload)) {
            return std::llround(gs->duration());
        }
        return std::get<SqPulse>(payload).duration;
    }
    std::int64_t end() const { return start + duration(); }
};

struct PulseSchedule {
    std::vector<PulseInstruction> instructions;
    std::int64_t total_duration = 0;

    std::size_t add(PulseInstruction inst) {
        total_duration = std::max(total_duration, inst.end());
        instructions.push_back(std::move(inst));
        return instructions.size() - 1;
    }

    std::vector<Channel> channels() const {
        std::vector<Channel> out;
        for (const auto &i : instructions) {
            out.push_back(i.channel);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

/// Total schedule length in dt.
inline std::int64_t schedule_duration(const PulseSchedule &s) { return s.total_duration; }

/// Throws ArgumentError unless starts are non-negative, instructions on one channel do not
/// overlap, emitted durations are multiples of 16 dt, and total_duration is the latest end.
inline void validate_schedule(const PulseSchedule &s) {
    std::int64_t latest = 0;
    std::vector<const PulseInstruction *> sorted;
    for (const auto &i : s.instructions) {
        if (i.start < 0) {
            throw ArgumentError("instruction with negative start");
        }
        if (i.duration() % kDurationQuantum != 0) {
            throw ArgumentError("instruction duration " + std::to_string(i.duration()) + " is not a multiple of 16");
        }
        latest = std::max(latest, i.end());
        sorted.push_back(&i);
    }
    std::sort(sorted.begin(), sorted.end(), [](const auto *a, const auto *b) {
        return std::tie(a->channel, a->start) < std::tie(b->channel, b->start);
    });
    for (std::size_t k = 1; k < sorted.size(); ++k) {
        if (sorted[k]->channel == sorted[k - 1]->channel && sorted[k]->start < sorted[k - 1]->end()) {
            throw ArgumentError("overlapping instructions on channel " + sorted[k]->channel.name());
        }
    }
    if (latest != s.total_duration) {
        throw ArgumentError("total_duration does not match the latest instruction end");
    }
}

}  // namespace qupad
