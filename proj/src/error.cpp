#include "rodessa/error.hpp"

namespace rodessa {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidWindow: return "invalid window";
    case ErrorKind::Index: return "index error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::DegenerateScale: return "degenerate scale";
    case ErrorKind::Convergence: return "convergence error";
    case ErrorKind::Rank: return "rank error";
    case ErrorKind::Argument: return "argument error";
    case ErrorKind::Configuration: return "configuration error";
    case ErrorKind::Calibration: return "calibration error";
    case ErrorKind::Verticality: return "verticality error";
    case ErrorKind::Data: return "data error";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

}  // namespace rodessa
