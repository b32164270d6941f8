// wh_cli: exit 0 when every check passes, 1 on a failed check, 2 on usage or config errors.

#include <iostream>

#include "wh/cli.hpp"

int main(int argc, char** argv) {
  wh::cli::CommandLine cmd;
  wh::cli::RunConfig config;
  try {
    cmd.app.parse(argc, argv);
    config = cmd.config();
    wh::cli::validate(config);
  } catch (const CLI::Success& e) {
    return cmd.app.exit(e);
  } catch (const CLI::ParseError& e) {
    cmd.app.exit(e);
    return 2;
  } catch (const wh::Error& e) {
    std::cerr << "wh_cli: " << e.what() << "\n";
    return 2;
  }
  try {
    auto bundle = wh::cli::run(config);
    wh::cli::write_outputs(bundle, config);
    std::cout << bundle.with_metadata().dump(2) << "\n";
    return bundle.pass() ? 0 : 1;
  } catch (const wh::cli::CheckError& e) {
    std::cerr << "wh_cli: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "wh_cli: " << e.what() << "\n";
    return 2;
  }
}
