#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "cfrag/corpus.hpp"
#include "cfrag/util/errors.hpp"
#include "cfrag/util/text.hpp"

namespace cfrag::corpus {

namespace {

constexpr std::array<std::string_view, 8> kHpSeries = {
    "Vela", "Aster", "Corvid", "Lyra", "Orion Pro", "Nimbus", "Zephyr", "Halcyon"};
constexpr std::array<std::string_view, 8> kDirectSeries = {
    "Latitude", "Meridian", "Solstice", "Tern", "Basalt", "Kestrel", "Quarry", "Ridge"};
constexpr std::array<std::string_view, 6> kProductTypes = {
    "laptop", "desktop", "workstation", "monitor", "thin client", "tablet"};

// Hidden text emitted by PDF extraction: chart ticks, stray numbers, legends.
constexpr std::array<std::string_view, 12> kSpuriousLines = {
    "0 100 200 300 400 500",
    "kgCO2e",
    "0% 20% 40% 60% 80% 100%",
    "1.8",
    "27.4 12.9 3.1",
    "Figure 2",
    "*",
    "3 1 4 1 5",
    "ECO-DECL 2021",
    "%",
    "Confidential draft layer",
    "0.45",
};

constexpr std::array<std::string_view, 18> kBoilerplate = {
    "The product carbon footprint is calculated with a streamlined life cycle assessment "
    "model that combines product attributes with industry average emission factors.",
    "Results are estimates and carry uncertainty because supply chain data are "
    "incomplete and vary between production batches.",
    "The assessment boundary covers raw material extraction, component production, "
    "final assembly, distribution to the customer, the use phase and end of life "
    "treatment.",
    "Emissions from the use phase depend on the electricity grid mix of the region where "
    "the product is operated and on the assumed daily usage profile.",
    "Transportation assumes a mix of air, sea and road freight from the assembly site to "
    "regional distribution centres.",
    "End of life treatment assumes collection through take back programs and recycling "
    "of metals and plastics where infrastructure exists.",
    "The breakdown of manufacturing emissions attributes the impact of each part based on "
    "its mass, material composition and production process.",
    "Integrated circuits on boards and storage devices are among the most carbon intensive "
    "parts because of energy demanding wafer fabrication.",
    "Comparisons between products should be made with care since models and data sources "
    "change over time.",
    "This report follows the product attribute to impact algorithm developed together "
    "with academic partners and industry peers.",
    "Packaging includes the box, protective inserts and printed documentation shipped with "
    "the unit.",
    "Values shown in charts are rounded for readability and individual shares may not add "
    "up exactly.",
    "The reported figure represents the mean of a probability distribution generated with "
    "Monte Carlo simulation.",
    "Customers can reduce the footprint by extending the service life of the device and "
    "enabling power management features.",
    "Data for purchased parts were collected from suppliers where available and "
    "complemented with secondary databases otherwise.",
    "The functional unit is one device used for its expected lifetime under typical "
    "office conditions.",
    "Renewable electricity purchased for final assembly sites is reflected in the "
    "manufacturing estimate.",
    "Further information about the methodology is available from the sustainability "
    "office on request.",
};

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool chance(Rng& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::bernoulli_distribution(p)(rng);
}

// Tenths-of-a-unit integer -> decimal text. integer_style drops ".0".
std::string tenths_text(int tenths, bool integer_style) {
  if (integer_style && tenths % 10 == 0) return std::to_string(tenths / 10);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

double tenths_value(const std::string& s) { return *text::parse_double(s); }

// Splits `total` tenths into `parts` positive shares, each at least `floor`
// tenths and a multiple of `step`.
std::vector<int> split_shares(Rng& rng, int parts, int total, int floor, int step) {
  std::vector<double> weights(static_cast<std::size_t>(parts));
  for (auto& w : weights) w = std::pow(uniform(rng, 0.2, 1.0), 2.0);
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  const int budget = total - floor * parts;
  std::vector<int> shares(static_cast<std::size_t>(parts));
  int used = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    int extra = static_cast<int>(std::floor(weights[i] / sum * budget / step)) * step;
    shares[i] = floor + extra;
    used += shares[i];
  }
  // remainder goes to the largest share
  auto largest = std::max_element(shares.begin(), shares.end());
  *largest += total - used;
  return shares;
}

struct Row {
  std::string text;
  std::string key;  // component or stage id, empty for plain lines
};

using Block = std::vector<std::string>;

struct DraftDocument {
  CompanyProfile profile;
  std::string product_name;
  std::string product_type;
  std::string total_text;
  OrderedPercents lifecycle;
  OrderedPercents components;
  std::vector<std::pair<std::string, std::string>> rows;  // id -> exact row text
  std::vector<Block> blocks;
};

std::string component_label(CompanyProfile profile, std::string_view id) {
  const auto* spec = find_component(id);
  return std::string(profile == CompanyProfile::HpLifecycle ? spec->hp_label : spec->direct_label);
}

std::string percent_suffix(CompanyProfile profile) {
  return profile == CompanyProfile::HpLifecycle ? "%" : " %";
}

void add_boilerplate(Rng& rng, std::vector<Block>& blocks) {
  std::vector<std::size_t> order(kBoilerplate.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const int sentences = uniform_int(rng, 10, 16);
  Block para;
  for (int i = 0; i < sentences; ++i) {
    para.emplace_back(kBoilerplate[order[static_cast<std::size_t>(i)]]);
    if (para.size() == 4 || i + 1 == sentences) {
      blocks.push_back(std::move(para));
      para.clear();
    }
  }
}

DraftDocument draft(Rng& rng, CompanyProfile profile, const std::string& model_code,
                    const SynthConfig& cfg) {
  DraftDocument d;
  d.profile = profile;
  const bool hp = profile == CompanyProfile::HpLifecycle;
  const auto& series = hp ? kHpSeries : kDirectSeries;
  d.product_name = std::string(series[static_cast<std::size_t>(uniform_int(rng, 0, 7))]) + " " +
                   model_code;
  if (chance(rng, 0.5)) d.product_name += " G" + std::to_string(uniform_int(rng, 1, 9));
  d.product_type = std::string(kProductTypes[static_cast<std::size_t>(uniform_int(rng, 0, 5))]);
  const bool integer_style = chance(rng, 0.3);

  const int total_tenths = uniform_int(rng, 800, 15000);
  d.total_text = tenths_text(total_tenths, integer_style);

  // components: 4-8 distinct ids in random order
  std::vector<std::string_view> ids;
  for (const auto& c : component_catalog()) ids.push_back(c.id);
  std::shuffle(ids.begin(), ids.end(), rng);
  const int count = uniform_int(rng, 4, 8);
  ids.resize(static_cast<std::size_t>(count));
  const int step = integer_style ? 10 : 1;
  int component_total = 1000;
  if (!integer_style && chance(rng, 0.2)) component_total += chance(rng, 0.5) ? 3 : -3;
  const auto shares = split_shares(rng, count, component_total, integer_style ? 10 : 5, step);
  std::vector<Row> component_rows;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto value_text = tenths_text(shares[i], integer_style);
    component_rows.push_back(
        {component_label(profile, ids[i]) + " " + value_text + percent_suffix(profile),
         std::string(ids[i])});
    d.components.emplace_back(std::string(ids[i]), tenths_value(value_text));
    d.rows.emplace_back(std::string(ids[i]), component_rows.back().text);
  }

  std::vector<Block> blocks;
  if (hp) {
    blocks.push_back({"Hollis Product Carbon Footprint", d.product_name,
                      "Product name: " + d.product_name, "Product type: " + d.product_type});
    blocks.push_back({"Display size " + std::to_string(uniform_int(rng, 12, 32)) + ".0 in",
                      "Memory " + std::to_string(8 << uniform_int(rng, 0, 3)) + " GB",
                      "Weight " + tenths_text(uniform_int(rng, 9, 120), false) + " kg",
                      "Assumed lifetime " + std::to_string(uniform_int(rng, 3, 6)) + " years",
                      "Use location Europe"});
    const int sd = std::max(1, total_tenths / 40);
    blocks.push_back({"Product Carbon Footprint (PCF)",
                      "Estimated impact " + d.total_text + " kgCO2e",
                      "Standard deviation " + tenths_text(sd, integer_style) + " kgCO2e"});
    const int manufacturing =
        integer_style ? uniform_int(rng, 40, 85) * 10 : uniform_int(rng, 400, 850);
    const int transport = uniform_int(rng, 1, 10) * 10;
    const int eol = integer_style ? 10 : uniform_int(rng, 5, 30);
    const int use = 1000 - manufacturing - transport - eol;
    const std::array<std::pair<std::string_view, int>, 4> stage_values = {
        {{"manufacturing", manufacturing}, {"transport", transport}, {"use", use},
         {"end_of_life", eol}}};
    Block lifecycle = {"Lifecycle breakdown"};
    for (const auto& [id, tenths] : stage_values) {
      auto value_text = tenths_text(tenths, integer_style);
      lifecycle.push_back(std::string(find_stage(id)->label) + " " + value_text + "%");
      d.lifecycle.emplace_back(std::string(id), tenths_value(value_text));
      d.rows.emplace_back(std::string(id), lifecycle.back());
    }
    blocks.push_back(std::move(lifecycle));
  } else {
    blocks.push_back({"Delmar Product Environmental Profile", "Model: " + d.product_name,
                      "Category: " + d.product_type});
    blocks.push_back({"Total carbon footprint: " + d.total_text + " kg CO2e",
                      "Reference year " + std::to_string(uniform_int(rng, 2019, 2024))});
  }

  // component table, optionally broken into several paragraphs
  Block table = {hp ? "Manufacturing breakdown by component"
                    : "Carbon footprint by component (share of total)"};
  for (std::size_t i = 0; i < component_rows.size(); ++i) {
    if (i > 0 && chance(rng, cfg.paragraph_split_rate)) {
      blocks.push_back(std::move(table));
      table.clear();
    }
    table.push_back(component_rows[i].text);
  }
  blocks.push_back(std::move(table));

  add_boilerplate(rng, blocks);
  blocks.push_back({"Shares may not add up to 100% due to rounding.",
                    "Report version " + std::to_string(uniform_int(rng, 1, 5))});
  d.blocks = std::move(blocks);
  return d;
}

std::string render(Rng& rng, DraftDocument& d, const SynthConfig& cfg) {
  if (chance(rng, cfg.shuffle_probability)) std::shuffle(d.blocks.begin(), d.blocks.end(), rng);
  std::string out;
  for (std::size_t b = 0; b < d.blocks.size(); ++b) {
    if (b) out += "\n\n";
    const auto& block = d.blocks[b];
    for (std::size_t l = 0; l < block.size(); ++l) {
      if (l) out += '\n';
      out += block[l];
      if (chance(rng, cfg.spurious_token_rate)) {
        out += '\n';
        out += kSpuriousLines[static_cast<std::size_t>(
            uniform_int(rng, 0, static_cast<int>(kSpuriousLines.size()) - 1))];
      }
    }
  }
  out += '\n';
  return out;
}

// Reorders `values` by the position of their table rows in the rendered text.
void order_by_appearance(OrderedPercents& values, const DraftDocument& d, const std::string& text) {
  const std::string haystack = "\n" + text;
  auto position = [&](const std::string& key) {
    for (const auto& [id, row] : d.rows) {
      if (id == key) return haystack.find("\n" + row + "\n");
    }
    return std::string::npos;
  };
  std::stable_sort(values.begin(), values.end(),
                   [&](const auto& a, const auto& b) { return position(a.first) < position(b.first); });
}

std::vector<std::string> model_codes(Rng& rng, std::size_t count) {
  std::set<std::string> seen;
  std::vector<std::string> codes;
  while (codes.size() < count) {
    std::string code(1, static_cast<char>('A' + uniform_int(rng, 0, 25)));
    code += std::to_string(uniform_int(rng, 1000, 9999));
    if (seen.insert(code).second) codes.push_back(std::move(code));
  }
  return codes;
}

}  // namespace

void SynthConfig::validate() const {
  if (document_count == 0) throw ConfigError("synth: document_count must be positive");
  if (document_count > 200000) throw ConfigError("synth: document_count too large");
  const std::array<std::pair<std::string_view, double>, 4> probs = {
      {{"lifecycle_share", lifecycle_share},
       {"shuffle_probability", shuffle_probability},
       {"spurious_token_rate", spurious_token_rate},
       {"paragraph_split_rate", paragraph_split_rate}}};
  for (const auto& [name, p] : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ConfigError("synth: " + std::string(name) + " must lie in [0,1]");
    }
  }
}

SyntheticCorpus synthesize_corpus(const SynthConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const auto codes = model_codes(rng, config.document_count);
  SyntheticCorpus out;
  out.documents.reserve(config.document_count);
  out.records.reserve(config.document_count);
  for (std::size_t i = 0; i < config.document_count; ++i) {
    const auto profile = chance(rng, config.lifecycle_share) ? CompanyProfile::HpLifecycle
                                                             : CompanyProfile::DirectComponent;
    auto d = draft(rng, profile, codes[i], config);
    auto raw = render(rng, d, config);

    char id[32];
    std::snprintf(id, sizeof(id), "doc-%04zu", i + 1);

    ExtractionRecord rec;
    rec.doc_id = id;
    rec.product_name = d.product_name;
    rec.product_type = d.product_type;
    rec.total_pcf = tenths_value(d.total_text);
    rec.component_percents = d.components;
    order_by_appearance(rec.component_percents, d, raw);
    if (profile == CompanyProfile::HpLifecycle) {
      rec.schema = Schema::LifecycleBreakdown;
      rec.lifecycle_percents = d.lifecycle;
      order_by_appearance(*rec.lifecycle_percents, d, raw);
    } else {
      rec.schema = Schema::DirectComponent;
    }

    const int pages = text::count_words(raw) > 420 ? 2 : 1;
    auto doc = make_document(id, profile, std::move(raw), pages);

    // The generator must never emit text its own profile cannot read back.
    auto check = extract_fields(doc, ExtractorProfile::builtin(profile));
    const auto* got = std::get_if<ExtractionRecord>(&check);
    if (got == nullptr || !(*got == rec)) {
      throw std::logic_error("synthesized document " + rec.doc_id +
                             " does not round-trip through its extractor");
    }
    out.documents.push_back(std::move(doc));
    out.records.push_back(std::move(rec));
  }
  return out;
}

}  // namespace cfrag::corpus
