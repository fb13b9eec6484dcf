// deepagg: aggregate convolutional feature tensors into global descriptors,
// whiten them, and evaluate retrieval.
//
// Exit codes: 0 success, 2 validation error, 3 data error.

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "deepagg/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"deepagg - deep feature aggregation for image retrieval"};
  app.require_subcommand(1);
  deepagg::cli::register_commands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const deepagg::Error& e) {
    std::cerr << "deepagg: " << e.what() << "\n";
    return e.code() == deepagg::ErrorCode::InvalidArgument ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "deepagg: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
