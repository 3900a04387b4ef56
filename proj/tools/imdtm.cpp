#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "imdtm/imdtm.hpp"

namespace {

std::vector<int> parse_orders(const std::string& text) {
  // "3" -> {3}; "0,1" -> {0,1}; "2-5" -> {2,3,4,5}
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-', 1);
    if (dash == std::string::npos) {
      out.push_back(std::stoi(item));
    } else {
      const int lo = std::stoi(item.substr(0, dash));
      const int hi = std::stoi(item.substr(dash + 1));
      for (int v = lo; v <= hi; ++v) out.push_back(v);
    }
  }
  if (out.empty()) throw imdtm::ConfigError("empty order list '" + text + "'");
  return out;
}

int dump_stencil(int radius, const std::string& sources, const std::string& targets) {
  const auto geom = imdtm::NeighborhoodGeometry::uniform(radius, 1.0);
  const auto src = parse_orders(sources);
  const auto ws = imdtm::build_weights(geom, imdtm::OrderBand::from_orders(src), parse_orders(targets));
  std::cout << "target_order,neighbor_offset,source_order,weight\n";
  for (std::size_t t = 0; t < ws.targets().size(); ++t)
    for (int j = 0; j < geom.size(); ++j)
      for (int s = 0; s < ws.sources().count; ++s)
        std::cout << ws.targets()[t] << ',' << imdtm::format_double(geom.offsets()[j]) << ','
                  << ws.sources().base + s << ',' << imdtm::format_double(ws.weight(t, j, s)) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterated multipoint differential transform solver"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "evolve a configured experiment and write diagnostics CSV");
  std::string config_path;
  run->add_option("--config", config_path, "flat key = value configuration file");
  std::map<std::string, std::string> flags;
  for (const auto& key : imdtm::config_detail::known_keys()) run->add_option("--" + key, flags[key]);

  auto* stencil = app.add_subcommand("stencil", "stencil weight tools");
  stencil->require_subcommand(1);
  auto* dump = stencil->add_subcommand("dump", "print weights as CSV");
  int radius = 1;
  std::string sources = "0";
  std::string targets;
  dump->add_option("--radius", radius)->required();
  dump->add_option("--source-orders", sources, "e.g. 0  or 0,1  or 2-3");
  dump->add_option("--target-orders", targets, "e.g. 1,2  or 0-5")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*dump) return dump_stencil(radius, sources, targets);

    std::string text;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "imdtm: cannot read config '" << config_path << "'\n";
        return 1;
      }
      std::stringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const auto& key : imdtm::config_detail::known_keys())
      if (run->count("--" + key) > 0) overrides.emplace_back(key, flags[key]);
    const auto config = imdtm::parse_config(text, overrides);
    const auto result = imdtm::run(config, &std::cerr);
    return result.status;
  } catch (const imdtm::ConfigError& e) {
    std::cerr << "imdtm: configuration error: " << e.what() << '\n';
    return 1;
  } catch (const imdtm::Error& e) {
    std::cerr << "imdtm: " << e.what() << '\n';
    return 1;
  }
}
