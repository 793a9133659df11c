#include "impeval/fixture.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "impeval/errors.hpp"
#include "impeval/utf8.hpp"

namespace impeval {

using nlohmann::json;

namespace {

// Planted vocabulary. Terms are already in normalized form. Several entries
// deliberately share prefixes (肺/肺癌, suv/suvmax) so the corpus exercises
// longest-match behavior.
const std::vector<std::pair<std::string, Category>>& vocabulary() {
    static const std::vector<std::pair<std::string, Category>> kTerms = {
        {"肺", Category::kAnatomy},
        {"肝脏", Category::kAnatomy},
        {"纵隔", Category::kAnatomy},
        {"淋巴结", Category::kAnatomy},
        {"脑实质", Category::kAnatomy},
        {"骨骼", Category::kAnatomy},
        {"胸膜", Category::kAnatomy},
        {"胰腺", Category::kAnatomy},
        {"脾脏", Category::kAnatomy},
        {"肾上腺", Category::kAnatomy},
        {"甲状腺", Category::kAnatomy},
        {"前列腺", Category::kAnatomy},
        {"结肠", Category::kAnatomy},
        {"胃壁", Category::kAnatomy},
        {"乳腺", Category::kAnatomy},
        {"liver", Category::kAnatomy},
        {"spleen", Category::kAnatomy},
        {"mediastinum", Category::kAnatomy},
        {"thyroid", Category::kAnatomy},
        {"pancreas", Category::kAnatomy},
        {"lymph node", Category::kAnatomy},
        {"femur", Category::kAnatomy},
        {"pleura", Category::kAnatomy},
        {"fdg", Category::kTracer},
        {"psma", Category::kTracer},
        {"dotatate", Category::kTracer},
        {"多巴胺", Category::kTracer},
        {"淀粉样蛋白", Category::kTracer},
        {"tau蛋白", Category::kTracer},
        {"肺癌", Category::kPathology},
        {"转移瘤", Category::kPathology},
        {"骨转移", Category::kPathology},
        {"淋巴瘤", Category::kPathology},
        {"炎性病变", Category::kPathology},
        {"结节", Category::kPathology},
        {"囊肿", Category::kPathology},
        {"胸腔积液", Category::kPathology},
        {"肝囊肿", Category::kPathology},
        {"脂肪瘤", Category::kPathology},
        {"metastasis", Category::kPathology},
        {"lymphoma", Category::kPathology},
        {"nodule", Category::kPathology},
        {"cyst", Category::kPathology},
        {"carcinoma", Category::kPathology},
        {"effusion", Category::kPathology},
        {"granuloma", Category::kPathology},
        {"suvmax", Category::kGeneral},
        {"suv", Category::kGeneral},
        {"代谢增高", Category::kGeneral},
        {"摄取增高", Category::kGeneral},
        {"葡萄糖代谢", Category::kGeneral},
        {"放射性浓聚", Category::kGeneral},
        {"密度影", Category::kGeneral},
        {"uptake", Category::kGeneral},
        {"hypermetabolic", Category::kGeneral},
    };
    return kTerms;
}

// Connective fragments. None of these may contain a vocabulary term as a
// substring, and none may start with a character that extends a vocabulary
// term planted immediately before it (a unit test enforces the first rule).
const std::vector<std::string> kCjkLinks = {"显示", "可见", "区域见", "呈"};
const std::vector<std::string> kCjkTails = {
    "，边界欠清，建议随访复查。",
    "，形态尚规则，与周围组织分界欠清。",
    "，较前片对比无明显变化。",
    "，请结合临床及其他检查。",
    "，必要时行增强扫描进一步评估。",
    "，相应区域放射性分布欠均匀。",
};
const std::vector<std::string> kCjkOpeners = {"双侧", "右侧", "左侧", "扫描区", "局部"};
const std::vector<std::string> kLatinOpeners = {"the", "both sides of the", "a segment of the"};
const std::vector<std::string> kLatinLinks = {"shows", "demonstrates", "contains"};
const std::vector<std::string> kLatinTails = {
    ", margins are ill defined and follow up is advised.",
    ", appearance is stable compared with the prior study.",
    ", further clinical correlation is recommended.",
    ", no other focal abnormality in this region.",
};
const std::vector<std::string> kImpressionTailsCjk = {
    "，考虑恶性可能，建议随访",
    "，性质待定，建议结合临床",
    "，较前相仿",
    "，建议定期复查",
};
const std::vector<std::string> kImpressionTailsLatin = {
    ", likely malignant and follow up is advised",
    ", of indeterminate nature",
    ", stable in the interval",
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

    // Uniform in [0,1); engine output is standard-specified, so this is
    // bit-reproducible across platforms.
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return unit() < p; }

private:
    std::mt19937_64 engine_;
};

struct TermPick {
    const std::string* term;
    Category category;
};

class TermPool {
public:
    TermPool() {
        for (const auto& [term, category] : vocabulary()) {
            const bool latin = static_cast<unsigned char>(term[0]) < 0x80;
            auto& buckets = latin ? latin_ : cjk_;
            buckets[static_cast<int>(category)].push_back(&term);
        }
    }

    const std::string& pick(Rng& rng, Category category, bool latin) const {
        const auto& bucket =
            (latin ? latin_ : cjk_)[static_cast<int>(category)];
        return *bucket[rng.below(bucket.size())];
    }

private:
    std::array<std::vector<const std::string*>, 4> cjk_;
    std::array<std::vector<const std::string*>, 4> latin_;
};

std::string zero_padded(std::size_t value, int width) {
    std::string digits = std::to_string(value);
    if (static_cast<int>(digits.size()) < width) {
        digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
    }
    return digits;
}

std::string measurement(Rng& rng) {
    return "suvmax " + std::to_string(1 + rng.below(29)) + "." + std::to_string(rng.below(10));
}

const std::string& tracer_term_for(const std::string& tag, Rng& rng) {
    static const std::string kFdg = "fdg";
    static const std::string kDopamine = "多巴胺";
    static const std::string kAmyloid = "淀粉样蛋白";
    static const std::string kTau = "tau蛋白";
    static const std::string kPsma = "psma";
    static const std::string kDotatate = "dotatate";
    if (tag == "FDG") return kFdg;
    if (tag == "dopamine") return kDopamine;
    if (tag == "amyloid") return kAmyloid;
    if (tag == "tau") return kTau;
    return rng.chance(0.5) ? kPsma : kDotatate;
}

} // namespace

Lexicon fixture_lexicon() { return lexicon_from_terms(vocabulary()); }

Fixture generate_fixture(const FixtureSpec& spec) {
    if (spec.n_patients < 1) {
        throw ArgumentError("fixture: n_patients must be >= 1");
    }
    if (spec.tracer_mix.empty()) {
        throw ArgumentError("fixture: tracer_mix must not be empty");
    }
    double total_weight = 0.0;
    for (const auto& [tag, weight] : spec.tracer_mix) {
        if (weight <= 0.0) {
            throw ArgumentError("fixture: tracer weight for '" + tag + "' must be positive");
        }
        total_weight += weight;
    }
    if (total_weight <= 0.0) {
        throw ArgumentError("fixture: tracer weights sum to zero");
    }
    if (spec.train_fraction < 0 || spec.validation_fraction < 0 ||
        spec.train_fraction + spec.validation_fraction > 1.0) {
        throw ArgumentError("fixture: split fractions out of range");
    }

    Rng rng(spec.seed);
    const TermPool pool;
    const double test_fraction = 1.0 - spec.train_fraction - spec.validation_fraction;

    // Patients are partitioned across splits first; reports then draw
    // patients only from their split's pool, which keeps the split
    // patient-level by construction. Fewer than three patients cannot
    // populate three disjoint pools, so everything collapses into train.
    const std::size_t P = spec.n_patients;
    std::size_t p_val = 0;
    std::size_t p_test = 0;
    if (P >= 3) {
        if (spec.validation_fraction > 0) {
            p_val = std::max<std::size_t>(
                1, static_cast<std::size_t>(std::llround(
                       static_cast<double>(P) * spec.validation_fraction)));
        }
        if (test_fraction > 0) {
            p_test = std::max<std::size_t>(
                1, static_cast<std::size_t>(
                       std::llround(static_cast<double>(P) * test_fraction)));
        }
        if (p_val + p_test >= P) {
            p_val = spec.validation_fraction > 0 ? 1 : 0;
            p_test = test_fraction > 0 ? 1 : 0;
        }
    }
    const std::size_t p_train = P - p_val - p_test;

    std::vector<std::string> patients;
    patients.reserve(P);
    for (std::size_t i = 0; i < P; ++i) {
        patients.push_back("p" + zero_padded(i + 1, 5));
    }
    const auto patient_pool = [&](Split split) {
        switch (split) {
        case Split::kTrain:
            return std::pair<std::size_t, std::size_t>{0, p_train};
        case Split::kValidation:
            return std::pair<std::size_t, std::size_t>{p_train, p_val};
        case Split::kTest:
            return std::pair<std::size_t, std::size_t>{p_train + p_val, p_test};
        }
        return std::pair<std::size_t, std::size_t>{0, p_train};
    };

    const std::size_t n = spec.n_reports;
    std::size_t n_val =
        p_val > 0 ? static_cast<std::size_t>(
                        std::llround(static_cast<double>(n) * spec.validation_fraction))
                  : 0;
    std::size_t n_test =
        p_test > 0 ? static_cast<std::size_t>(
                         std::llround(static_cast<double>(n) * test_fraction))
                   : 0;
    if (n_val + n_test > n) {
        n_val = 0;
        n_test = p_test > 0 ? n : 0;
    }
    const std::size_t n_train = n - n_val - n_test;

    const auto pick_tracer = [&]() -> const std::string& {
        double u = rng.unit() * total_weight;
        for (const auto& [tag, weight] : spec.tracer_mix) {
            u -= weight;
            if (u < 0.0) {
                return tag;
            }
        }
        return spec.tracer_mix.back().first;
    };

    Fixture fixture;
    fixture.corpus.source_path = "<fixture seed=" + std::to_string(spec.seed) + ">";
    fixture.corpus.reports.reserve(n);
    fixture.sidecar.reserve(n);

    std::size_t sequence = 0;
    const std::array<std::pair<Split, std::size_t>, 3> plan = {
        std::pair{Split::kTrain, n_train},
        std::pair{Split::kValidation, n_val},
        std::pair{Split::kTest, n_test},
    };

    for (const auto& [split, quota] : plan) {
        const auto [pool_start, pool_size] = patient_pool(split);
        for (std::size_t k = 0; k < quota; ++k) {
            ++sequence;
            Report report;
            report.id = "r" + zero_padded(sequence, 6);
            report.patient_id = patients[pool_start + rng.below(pool_size)];
            report.tracer = pick_tracer();
            report.split = split;

            const bool latin = rng.chance(0.15);
            std::set<std::string> findings_terms;
            const auto plant = [&](const std::string& term) {
                findings_terms.insert(term);
                return term;
            };

            // One tracer mention up front, then anatomy/pathology sentences
            // until the length target is met.
            // sentence assembly overshoots slightly, so the base range sits
            // under the 870-character goal
            const std::size_t target = 570 + rng.below(541);
            std::string findings;
            {
                const std::string& tracer_term = tracer_term_for(report.tracer, rng);
                if (latin) {
                    findings += plant(tracer_term) + " imaging of the whole body. ";
                } else {
                    findings += plant(tracer_term) + "显像所见：";
                }
            }
            while (utf8::length(findings) < target) {
                const std::string& anatomy = pool.pick(rng, Category::kAnatomy, latin);
                const std::string& pathology = pool.pick(rng, Category::kPathology, latin);
                if (latin) {
                    findings += kLatinOpeners[rng.below(kLatinOpeners.size())] + " " +
                                plant(anatomy) + " " +
                                kLatinLinks[rng.below(kLatinLinks.size())] + " " +
                                plant(pathology);
                    if (rng.chance(0.6)) {
                        findings += " with " +
                                    plant(pool.pick(rng, Category::kGeneral, true)) + ", " +
                                    measurement(rng);
                        findings_terms.insert("suvmax");
                    }
                    findings += kLatinTails[rng.below(kLatinTails.size())] + " ";
                } else {
                    findings += kCjkOpeners[rng.below(kCjkOpeners.size())] +
                                plant(anatomy) +
                                kCjkLinks[rng.below(kCjkLinks.size())] +
                                plant(pathology);
                    if (rng.chance(0.7)) {
                        findings += "，" + plant(pool.pick(rng, Category::kGeneral, false)) +
                                    "，" + measurement(rng);
                        findings_terms.insert("suvmax");
                    }
                    findings += kCjkTails[rng.below(kCjkTails.size())];
                }
            }
            report.findings = std::move(findings);

            // The impression carries a known subset of the findings terms.
            std::vector<std::string> impression_terms;
            for (const std::string& term : findings_terms) {
                if (rng.chance(0.8)) {
                    impression_terms.push_back(term);
                }
            }
            if (impression_terms.empty()) {
                impression_terms.push_back(*findings_terms.begin());
            }
            const std::set<std::string> impression_set(impression_terms.begin(),
                                                       impression_terms.end());

            // clause assembly overshoots by roughly half a clause, so the
            // base target sits below the 240-character goal
            const std::size_t impression_target = 120 + rng.below(181);
            std::string impression;
            std::size_t clause_no = 0;
            std::size_t cursor = 0;
            while (cursor < impression_terms.size() ||
                   utf8::length(impression) < impression_target) {
                ++clause_no;
                impression += std::to_string(clause_no) + ".";
                // Two or three terms per clause; once terms run out, recycle
                // the planted set so no new entity appears.
                const std::size_t take = 2 + rng.below(2);
                std::string clause;
                for (std::size_t t = 0; t < take; ++t) {
                    const std::string& term =
                        cursor < impression_terms.size()
                            ? impression_terms[cursor++]
                            : impression_terms[rng.below(impression_terms.size())];
                    if (!clause.empty()) {
                        clause += latin ? ", " : "、";
                    }
                    clause += term;
                }
                impression += clause;
                impression += latin ? kImpressionTailsLatin[rng.below(kImpressionTailsLatin.size())]
                                    : kImpressionTailsCjk[rng.below(kImpressionTailsCjk.size())];
                impression += latin ? ". " : "；";
                if (clause_no > 24) {
                    break;
                }
            }
            if (!latin) {
                impression += "请结合临床。";
            }
            report.impression = std::move(impression);

            SidecarEntry entry;
            entry.id = report.id;
            entry.findings_entities.assign(findings_terms.begin(), findings_terms.end());
            entry.impression_entities.assign(impression_set.begin(), impression_set.end());
            fixture.sidecar.push_back(std::move(entry));
            fixture.corpus.reports.push_back(std::move(report));
        }
    }
    return fixture;
}

void save_sidecar(const std::vector<SidecarEntry>& sidecar,
                  const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open sidecar file for writing: " + path.string());
    }
    for (const SidecarEntry& entry : sidecar) {
        json record;
        record["id"] = entry.id;
        record["findings_entities"] = entry.findings_entities;
        record["impression_entities"] = entry.impression_entities;
        out << record.dump() << '\n';
    }
    if (!out) {
        throw IoError("write failure on sidecar file: " + path.string());
    }
}

std::vector<SidecarEntry> load_sidecar(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open sidecar file: " + path.string());
    }
    std::vector<SidecarEntry> sidecar;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
            continue;
        }
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        SidecarEntry entry;
        entry.id = record.at("id").get<std::string>();
        entry.findings_entities = record.at("findings_entities").get<std::vector<std::string>>();
        entry.impression_entities =
            record.at("impression_entities").get<std::vector<std::string>>();
        sidecar.push_back(std::move(entry));
    }
    return sidecar;
}

void write_fixture(const Fixture& fixture, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    save_corpus(fixture.corpus, dir / "corpus.jsonl");
    save_sidecar(fixture.sidecar, dir / "sidecar.jsonl");
    save_lexicon(fixture_lexicon(), dir / "lexicon.txt");
}

} // namespace impeval
