#ifndef TAGPARSE_CHECKPOINT_H_
#define TAGPARSE_CHECKPOINT_H_

#include <iosfwd>
#include <string>

#include "tagparse/tagger.h"

namespace tagparse {

inline constexpr int kCheckpointVersion = 1;

// JSON document holding everything needed to rebuild a model: scheme,
// dimensions, auxiliary tasks, vocabularies, hyperparameters and every
// parameter tensor by name.
void save_checkpoint(const TaggerModel& model, std::ostream& out);
void save_checkpoint(const TaggerModel& model, const std::string& path);

// Throws DataError on malformed input, an unknown version, or a tensor whose
// shape does not match the rebuilt model.
TaggerModel load_checkpoint(std::istream& in, const std::string& source = "<checkpoint>");
TaggerModel load_checkpoint(const std::string& path);

}  // namespace tagparse

#endif  // TAGPARSE_CHECKPOINT_H_
