// Copyright 2026 The neolrp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// neolrp sample|label|train|solve|route|evaluate|ablate --config FILE
//        [--seed N] [--out DIR]
//
// Prints the stage summary as JSON on stdout. On failure prints
// {"error": ..., "code": ..., "message": ...} on stderr and exits with the
// error code.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "neolrp/neolrp.h"

namespace {

int Fail(int code, const std::string& name, const std::string& message) {
  std::fprintf(stderr, "%s\n",
               nlohmann::json{{"error", name}, {"code", code}, {"message", message}}
                   .dump()
                   .c_str());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Location-routing with a neural routing-cost surrogate"};
  app.require_subcommand(1, 1);
  std::string config;
  std::optional<unsigned long long> seed;
  std::string out_dir;
  for (const char* stage : {"sample", "label", "train", "solve", "route", "evaluate", "ablate"}) {
    CLI::App* sub = app.add_subcommand(stage, std::string("run the ") + stage + " stage");
    sub->add_option("--config", config, "experiment config (JSON)")->required();
    sub->add_option("--seed", seed, "override the master seed");
    sub->add_option("--out", out_dir, "override the output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return Fail(NEOLRP_ERR_INVALID_ARGUMENT, "invalid_argument", e.what());
  }

  nlohmann::json overrides = nlohmann::json::object();
  if (seed) overrides["seed"] = *seed;
  if (!out_dir.empty()) overrides["out_dir"] = std::filesystem::absolute(out_dir).string();

  const std::string stage = app.get_subcommands().front()->get_name();
  char* result = nullptr;
  const int rc =
      neolrp_run_stage(stage.c_str(), config.c_str(), overrides.dump().c_str(), &result);
  if (rc != NEOLRP_OK) {
    std::fprintf(stderr, "%s\n", neolrp_last_error_json());
    return rc;
  }
  std::printf("%s\n", result);
  neolrp_string_free(result);
  return 0;
}
