#include "pwidths/error.hpp"

namespace pwidths {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnsupportedRegime: return "UnsupportedRegime";
    case ErrorKind::PointsCoincide: return "PointsCoincide";
    case ErrorKind::BeyondInjectivityRadius: return "BeyondInjectivityRadius";
    case ErrorKind::ShootingNoConverge: return "ShootingNoConverge";
    case ErrorKind::VectorTooLong: return "VectorTooLong";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::NewtonNoConverge: return "NewtonNoConverge";
    case ErrorKind::IdenticallyZeroOnCircle: return "IdenticallyZeroOnCircle";
    case ErrorKind::NotASolution: return "NotASolution";
    case ErrorKind::LambdaAtPole: return "LambdaAtPole";
    case ErrorKind::PreconditionDecayFailed: return "PreconditionDecayFailed";
    case ErrorKind::IntegratorBlowup: return "IntegratorBlowup";
    case ErrorKind::NoCrossings: return "NoCrossings";
    case ErrorKind::OddCount: return "OddCount";
    case ErrorKind::ImmersionViolated: return "ImmersionViolated";
    case ErrorKind::SegmentsOverlap: return "SegmentsOverlap";
    case ErrorKind::LeftEmbeddingClass: return "LeftEmbeddingClass";
    case ErrorKind::NotStationary: return "NotStationary";
    case ErrorKind::AssemblyMismatch: return "AssemblyMismatch";
    case ErrorKind::QTooSmall: return "QTooSmall";
    case ErrorKind::MuTooLarge: return "MuTooLarge";
    case ErrorKind::TableTooSmall: return "TableTooSmall";
    case ErrorKind::AssertionFailed: return "AssertionFailed";
  }
  return "Unknown";
}

}  // namespace pwidths
