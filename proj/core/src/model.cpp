#include "nrpos/model.hpp"

#include <cmath>
#include <string>

#include "nrpos/error.hpp"

namespace nrpos {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigConflict: return "ConfigConflict";
    case ErrorCode::SlotNotScheduled: return "SlotNotScheduled";
    case ErrorCode::DuplicateDelay: return "DuplicateDelay";
    case ErrorCode::EmptyReference: return "EmptyReference";
    case ErrorCode::AllZero: return "AllZero";
    case ErrorCode::MissingReference: return "MissingReference";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::InvalidHyperbola: return "InvalidHyperbola";
    case ErrorCode::CoincidentFoci: return "CoincidentFoci";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownParameter: return "UnknownParameter";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

bool is_finite(const Position2D& p) noexcept {
  return std::isfinite(p.x) && std::isfinite(p.y);
}

const Position2D& GnbDeployment::gnb(int gnb_id) const {
  if (gnb_id < 1 || static_cast<std::size_t>(gnb_id) > positions.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "gNB id " + std::to_string(gnb_id) + " is outside the deployment");
  }
  return positions[static_cast<std::size_t>(gnb_id - 1)];
}

void GnbDeployment::validate() const {
  if (positions.size() < 3) {
    throw Error(ErrorCode::InvalidArgument, "deployment needs at least 3 gNBs");
  }
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (!is_finite(positions[i])) {
      throw Error(ErrorCode::InvalidArgument,
                  "gNB " + std::to_string(i + 1) + " has a non-finite coordinate");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (positions[i] == positions[j]) {
        throw Error(ErrorCode::InvalidArgument,
                    "gNB " + std::to_string(j + 1) + " and gNB " + std::to_string(i + 1) +
                        " are co-located");
      }
    }
  }
  if (!(scs_hz > 0.0) || !std::isfinite(scs_hz)) {
    throw Error(ErrorCode::InvalidArgument, "subcarrier spacing must be positive");
  }
  if (n_prb <= 0) {
    throw Error(ErrorCode::InvalidArgument, "n_prb must be positive");
  }
  if (!std::isfinite(carrier_hz)) {
    throw Error(ErrorCode::InvalidArgument, "carrier frequency must be finite");
  }
}

double euclidean_distance(const Position2D& a, const Position2D& b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

double time_of_flight(const Position2D& gnb, const Position2D& ue) noexcept {
  return euclidean_distance(gnb, ue) / kSpeedOfLight;
}

}  // namespace nrpos
