#pragma once

namespace hillband {

/// Boundary-condition parity on [0,1]: u, u1 matching with sign +1
/// (periodic) or -1 (semiperiodic).
enum class Parity { periodic, semiperiodic };

inline const char* to_string(Parity p) {
    return p == Parity::periodic ? "periodic" : "semiperiodic";
}

} // namespace hillband
