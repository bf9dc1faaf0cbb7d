#pragma once

#include <filesystem>
#include <iosfwd>

#include "duallstm/intention.hpp"
#include "duallstm/io.hpp"
#include "duallstm/trajectory.hpp"

namespace duallstm {

inline constexpr const char* kCheckpointMagic = "DUALLSTM v1";

/// Both trained networks plus the hyperparameters needed to reproduce the
/// run. Serialized as line-oriented text: the magic header, one
/// `TENSOR <name> <rows> <cols>` section per parameter tensor (row-major,
/// 17 significant digits), then a HYPER section of key=value lines.
struct ModelBundle {
  IntentionModel intent;
  TrajectoryModel traj;
  KeyValueMap hyper;
};

void save_checkpoint(std::ostream& out, const ModelBundle& bundle);
void save_checkpoint(const std::filesystem::path& path, const ModelBundle& bundle);

/// Refuses anything whose first line is not the v1 magic; validates tensor
/// shapes against the declared dimensions.
ModelBundle load_checkpoint(std::istream& in);
ModelBundle load_checkpoint(const std::filesystem::path& path);

}  // namespace duallstm
