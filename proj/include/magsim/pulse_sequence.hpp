#pragma once

#include <string>
#include <variant>
#include <vector>

namespace magsim {

// Pulse phases: x = 0, y = pi/2, -x = pi, -y = 3pi/2.
struct Delay {
    double t = 0.0;  // us
};

struct Pulse {
    double phase = 0.0;     // rotation axis azimuth, rad
    double angle = 0.0;     // flip angle, rad
    double duration = 0.0;  // us; zero for an instantaneous pulse
    double rabi = 0.0;      // MHz
};

using Element = std::variant<Delay, Pulse>;

struct SequenceMeta {
    int n_pi = 0;
    double tau = 0.0;
    std::string label;
};

struct PulseSequence {
    std::vector<Element> elements;
    SequenceMeta meta;

    double total_time() const
    {
        double t = 0.0;
        for (const auto& e : elements) {
            if (const auto* d = std::get_if<Delay>(&e))
                t += d->t;
            else
                t += std::get<Pulse>(e).duration;
        }
        return t;
    }
};

}  // namespace magsim
