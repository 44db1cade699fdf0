// Copyright (c) 2026 the logicbeam authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference external scorer speaking the line-delimited JSON protocol:
// {"prefixes": [[int,...],...]} in, {"logprobs": [[float x |V|],...]} out.
// Context-free by design; useful for wiring tests and as a protocol example.

#include <cmath>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

int main(int argc, char** argv) {
  CLI::App app{"logicbeam reference external scorer"};
  int vocab_size = 0;
  std::string mode = "uniform";
  app.add_option("--vocab-size", vocab_size, "Vocabulary size |V|")->required();
  app.add_option("--mode", mode, "uniform | ramp")->check(CLI::IsMember({"uniform", "ramp"}));
  CLI11_PARSE(app, argc, argv);
  if (vocab_size < 1) {
    std::cerr << "vocab size must be >= 1\n";
    return 1;
  }

  std::vector<double> row(static_cast<std::size_t>(vocab_size));
  if (mode == "uniform") {
    double lp = -std::log(static_cast<double>(vocab_size));
    for (auto& v : row) v = lp;
  } else {  // probability proportional to id + 1
    double total = static_cast<double>(vocab_size) * (vocab_size + 1) / 2.0;
    for (int i = 0; i < vocab_size; ++i)
      row[static_cast<std::size_t>(i)] = std::log((i + 1) / total);
  }

  std::string line;
  while (std::getline(std::cin, line)) {
    if (line.empty()) continue;
    nlohmann::json request;
    try {
      request = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "bad request: " << e.what() << '\n';
      return 1;
    }
    std::size_t batch = request.at("prefixes").size();
    nlohmann::json response;
    response["logprobs"] = nlohmann::json::array();
    for (std::size_t i = 0; i < batch; ++i) response["logprobs"].push_back(row);
    std::cout << response.dump() << '\n' << std::flush;
  }
  return 0;
}
