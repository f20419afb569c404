#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qlab/path.hpp"

namespace testutil {

// Path object over a hand-written queue sequence: events derived from the
// increments, times at 1, 2, 3, ...
inline qlab::SamplePath path_from_q(std::vector<qlab::QueueLen> q,
                                    qlab::ModelParams params = {0.9, 0.5}) {
    qlab::SamplePath p;
    p.params = params;
    p.q = std::move(q);
    for (std::size_t n = 1; n < p.q.size(); ++n) {
        p.events.push_back(p.q[n] > p.q[n - 1] ? qlab::EventKind::Arrival
                                               : qlab::EventKind::Token);
        p.times.push_back(static_cast<double>(n));
    }
    return p;
}

// Enumerate every valid queue path of the given length: one bit per slot,
// set = arrival, clear = token (which is a flat step at zero).
inline std::vector<qlab::QueueLen> q_from_bits(std::uint32_t bits, int len) {
    std::vector<qlab::QueueLen> q(static_cast<std::size_t>(len) + 1, 0);
    for (int n = 1; n <= len; ++n) {
        const qlab::QueueLen prev = q[static_cast<std::size_t>(n - 1)];
        q[static_cast<std::size_t>(n)] =
            ((bits >> (n - 1)) & 1u) ? prev + 1 : (prev > 0 ? prev - 1 : 0);
    }
    return q;
}

inline std::string golden_path(const std::string& name) {
    return std::string(QLAB_TEST_DIR) + "/golden/" + name;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace testutil
