#pragma once

#include <string>
#include <vector>

#include "aniso/config.hpp"
#include "aniso/errors.hpp"
#include "aniso/field.hpp"

namespace aniso {

struct RunSummary {
  std::string line;                // one-line summary: key result and error estimate
  std::vector<std::string> files;  // written into cfg.out
};

Field build_field(const FieldSpec& spec, const Anisotropy& a);

/// Runs cfg.command and writes its CSVs. Module errors propagate unchanged.
RunSummary run_subcommand(const RunConfig& cfg);

/// Process exit code for an error category (0 is success).
int exit_code(ErrorKind kind);

}  // namespace aniso
