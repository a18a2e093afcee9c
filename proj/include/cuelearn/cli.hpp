#pragma once

namespace cuelearn::cli {

// The cue command line: gen, prepare, baseline, train, eval, crossval,
// explain. Returns 0 on success, 2 on a usage error, 1 on any data, model,
// or I/O error (with a one-line diagnostic on stderr). Human-readable output
// goes to stdout; machine-readable records only ever go to files.
int run(int argc, const char* const* argv);

}  // namespace cuelearn::cli
