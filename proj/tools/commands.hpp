#pragma once

#include <CLI11.hpp>

namespace deepagg::cli {

/// Registers every subcommand on `app`. Each subcommand's callback runs the
/// command and throws deepagg::Error on failure.
void register_commands(CLI::App& app);

}  // namespace deepagg::cli
