#pragma once

namespace rayleigh::cli {

/// Parses arguments and runs one subcommand. Library errors propagate.
int run(int argc, char** argv);

}  // namespace rayleigh::cli
