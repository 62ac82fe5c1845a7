#pragma once

#include <stdexcept>
#include <string>

namespace leiden {

/// Fatal pipeline error tagged with the stage that raised it
/// ("ingest", "citations", "thesaurus", "geo", "ranking", "export", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace leiden
