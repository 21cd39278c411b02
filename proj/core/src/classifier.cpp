#include "cutguard/classifier.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "cutguard/errors.hpp"

namespace cutguard {
namespace {

// Generic s-expression reader used for the tree layout; guards inside it are
// re-serialized and handed to parse_expr.
struct SExpr {
    bool is_atom = true;
    std::string atom;
    std::vector<SExpr> list;
};

std::vector<std::string> tokenize_sexpr(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '#' || c == ';') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (c == '(' || c == ')') {
            tokens.emplace_back(1, c);
            ++i;
        } else {
            std::size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
                   text[j] != '(' && text[j] != ')' && text[j] != '#' && text[j] != ';')
                ++j;
            tokens.emplace_back(text.substr(i, j - i));
            i = j;
        }
    }
    return tokens;
}

SExpr read_sexpr(const std::vector<std::string>& tokens, std::size_t& pos) {
    if (pos >= tokens.size()) throw ConfigInvalid("unexpected end of tree expression");
    if (tokens[pos] == ")") throw ConfigInvalid("unexpected ')' in tree expression");
    if (tokens[pos] != "(") {
        SExpr s;
        s.atom = tokens[pos++];
        return s;
    }
    ++pos;
    SExpr s;
    s.is_atom = false;
    while (pos < tokens.size() && tokens[pos] != ")") s.list.push_back(read_sexpr(tokens, pos));
    if (pos >= tokens.size()) throw ConfigInvalid("missing ')' in tree expression");
    ++pos;
    return s;
}

std::string sexpr_text(const SExpr& s) {
    if (s.is_atom) return s.atom;
    std::string out = "(";
    for (std::size_t i = 0; i < s.list.size(); ++i) {
        if (i) out += ' ';
        out += sexpr_text(s.list[i]);
    }
    out += ')';
    return out;
}

DecisionLeaf parse_leaf(const std::string& atom, int& auto_label) {
    DecisionLeaf leaf;
    std::string verdict = atom;
    const auto colon = atom.find(':');
    if (colon != std::string::npos) {
        verdict = atom.substr(0, colon);
        leaf.label = atom.substr(colon + 1);
    }
    if (verdict == "interjection")
        leaf.is_interjection = true;
    else if (verdict == "clean")
        leaf.is_interjection = false;
    else
        throw ConfigInvalid("unknown leaf verdict '" + verdict + "'");
    if (leaf.label.empty()) leaf.label = "leaf" + std::to_string(auto_label++);
    return leaf;
}

DecisionBranch build_branch(const SExpr& s, std::vector<DecisionNode>& nodes, int& auto_label) {
    DecisionBranch branch;
    if (s.is_atom) {
        branch.leaf = parse_leaf(s.atom, auto_label);
        return branch;
    }
    if (s.list.size() != 4 || !s.list[0].is_atom || s.list[0].atom != "if")
        throw ConfigInvalid("tree nodes must look like (if <guard> <branch> <branch>)");

    const int index = static_cast<int>(nodes.size());
    nodes.emplace_back();
    nodes[index].guard = parse_expr(sexpr_text(s.list[1]));
    const DecisionBranch on_true = build_branch(s.list[2], nodes, auto_label);
    const DecisionBranch on_false = build_branch(s.list[3], nodes, auto_label);
    nodes[index].on_true = on_true;
    nodes[index].on_false = on_false;
    branch.node = index;
    return branch;
}

std::string strip_comment(const std::string& line) {
    std::string out = line;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] == '#' || out[i] == ';') {
            out.erase(i);
            break;
        }
    }
    return out;
}

std::vector<std::string> split_words(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> words;
    std::string w;
    while (in >> w) words.push_back(w);
    return words;
}

unsigned long parse_count(const std::string& word, const char* directive) {
    try {
        std::size_t used = 0;
        const unsigned long v = std::stoul(word, &used);
        if (used != word.size()) throw std::invalid_argument(word);
        return v;
    } catch (const std::exception&) {
        throw ConfigInvalid(std::string(directive) + " expects a non-negative integer, got '" +
                            word + "'");
    }
}

double parse_real(const std::string& word, const char* directive) {
    try {
        std::size_t used = 0;
        const double v = std::stod(word, &used);
        if (used != word.size()) throw std::invalid_argument(word);
        return v;
    } catch (const std::exception&) {
        throw ConfigInvalid(std::string(directive) + " expects a number, got '" + word + "'");
    }
}

void format_branch(std::ostringstream& out, const ClassifierConfig& config,
                   const DecisionBranch& branch, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    if (branch.is_leaf()) {
        out << pad << (branch.leaf.is_interjection ? "interjection" : "clean") << ':'
            << branch.leaf.label;
        return;
    }
    const DecisionNode& node = config.nodes[static_cast<std::size_t>(branch.node)];
    out << pad << "(if " << format_expr(node.guard) << '\n';
    format_branch(out, config, node.on_true, indent + 1);
    out << '\n';
    format_branch(out, config, node.on_false, indent + 1);
    out << ')';
}

void check_branch(const ClassifierConfig& config, const DecisionBranch& branch,
                  std::vector<int>& state, int depth);

void check_node(const ClassifierConfig& config, int index, std::vector<int>& state, int depth) {
    if (index < 0 || index >= static_cast<int>(config.nodes.size()))
        throw ConfigInvalid("branch references node " + std::to_string(index) +
                            " outside the tree");
    if (state[static_cast<std::size_t>(index)] == 1)
        throw ConfigInvalid("decision tree contains a cycle");
    if (state[static_cast<std::size_t>(index)] == 2) return;
    if (depth > static_cast<int>(config.nodes.size()))
        throw ConfigInvalid("decision tree deeper than its node count");

    state[static_cast<std::size_t>(index)] = 1;
    const DecisionNode& node = config.nodes[static_cast<std::size_t>(index)];
    if (check_expr(node.guard) != ExprType::Boolean)
        throw ConfigInvalid("guard of node " + std::to_string(index) + " is not boolean");
    for (const std::string& cname : named_constants(node.guard))
        if (!config.find_constant(cname))
            throw ConfigInvalid("guard references undefined constant '" + cname + "'");
    check_branch(config, node.on_true, state, depth + 1);
    check_branch(config, node.on_false, state, depth + 1);
    state[static_cast<std::size_t>(index)] = 2;
}

void check_branch(const ClassifierConfig& config, const DecisionBranch& branch,
                  std::vector<int>& state, int depth) {
    if (!branch.is_leaf()) check_node(config, branch.node, state, depth);
}

} // namespace

const ConstantDef* ClassifierConfig::find_constant(const std::string& cname) const {
    for (const auto& c : constants)
        if (c.name == cname) return &c;
    return nullptr;
}

void validate_config(const ClassifierConfig& config) {
    if (config.nodes.empty()) throw ConfigInvalid("classifier config has no decision nodes");
    std::vector<int> state(config.nodes.size(), 0);
    check_node(config, 0, state, 0);
}

TreeDecision evaluate_tree(const ClassifierConfig& config, const FrameFeatures& features) {
    if (config.nodes.empty()) throw ConfigInvalid("classifier config has no decision nodes");
    TreeDecision decision;
    const DecisionNode* node = &config.nodes[0];
    std::size_t steps = 0;
    for (;;) {
        if (++steps > config.nodes.size() + 1)
            throw ConfigInvalid("decision tree walk did not terminate");
        const ExprValue v = eval_expr_margin(node->guard, features, decision.deciding_gap);
        if (!std::holds_alternative<bool>(v))
            throw ConfigInvalid("guard evaluated to a number, expected a boolean");
        const DecisionBranch& branch = std::get<bool>(v) ? node->on_true : node->on_false;
        if (branch.is_leaf()) {
            decision.is_interjection = branch.leaf.is_interjection;
            decision.fired_rule = branch.leaf.label;
            return decision;
        }
        node = &config.nodes[static_cast<std::size_t>(branch.node)];
    }
}

std::vector<Verdict> classify_stream(std::span<const FrameEmbedding> frames,
                                     const ClassifierConfig& config) {
    return classify_stream_trace(frames, config).verdicts;
}

ClassifyTrace classify_stream_trace(std::span<const FrameEmbedding> frames,
                                    const ClassifierConfig& config) {
    if (frames.size() < 2) throw TooShort("classify_stream needs at least 2 frames");
    validate_config(config);

    ClassifyTrace trace;
    trace.verdicts.reserve(frames.size() - 1);
    trace.features.reserve(frames.size() - 1);

    FeatureStream fs(config.features);
    fs.prime(frames[0]);
    for (std::size_t i = 1; i < frames.size(); ++i) {
        const FrameFeatures feats = fs.step(frames[i]);
        Verdict v;
        v.frame_index = static_cast<std::uint32_t>(i);
        if (i < config.warmup_frames) {
            v.is_interjection = false;
            v.fired_rule = "warmup";
        } else {
            const TreeDecision d = evaluate_tree(config, feats);
            v.is_interjection = d.is_interjection;
            v.fired_rule = d.fired_rule;
        }
        fs.feedback(v.is_interjection);
        trace.features.push_back(feats);
        trace.verdicts.push_back(std::move(v));
    }
    return trace;
}

namespace {

// The ratio prefilter (1.07) and the MDRT schedule come straight from the
// tree descriptions; the final raw-distance gate is a calibration constant.
const std::string kCutiePreset = R"(# cutie interjection tree
name cutie
warmup 2
const ratio_gate 1.07
const st0_gate 2.0 free
tree (if (<= lt1_ratio ratio_gate) clean:ratio_prefilter
       (if (< mdr mdrt) clean:mdr_reject
         (if (> st0 st0_gate) interjection:st0_fire clean:st0_reject)))
)";

// Zeroth- and first-order gates for both window families, behind the same
// ratio prefilter and MDRT check. All numeric gates are calibration slots.
const std::string kXmemPreset = R"(# xmem interjection tree
name xmem
warmup 2
const ratio_gate 1.07
const st1_gate 5.0 free
const st0_gate 2.0 free
const lt0_gate 55.0 free
tree (if (<= lt1_ratio ratio_gate) clean:ratio_prefilter
       (if (< mdr mdrt) clean:mdr_reject
         (if (and (> st1_ratio st1_gate) (> st0 st0_gate)) interjection:short_fire
           (if (> lt0 lt0_gate) interjection:long_fire clean:reject))))
)";

// Short-window rules only; the long window is not consulted. The first guard
// disjoins the product rule with the simple perfect-separation rules, the
// fallback is the exponential trend boundary.
const std::string kSam2Preset = R"(# sam2 interjection rules
name sam2
warmup 2
tree (if (or (> (* st0 st1_ratio) 287)
             (> st0 170)
             (> st1_ratio 1)
             (> mdr_short 0.97))
       interjection:separating_rule
       (if (> st1_ratio (+ (exp (* -0.15 (- st0 170))) 1.03))
         interjection:trend_rule
         clean:below_trend))
)";

} // namespace

const std::string& preset_text(const std::string& name) {
    if (name == "cutie") return kCutiePreset;
    if (name == "xmem") return kXmemPreset;
    if (name == "sam2") return kSam2Preset;
    throw UnknownPreset("no preset named '" + name + "' (expected cutie, xmem, or sam2)");
}

ClassifierConfig preset(const std::string& name) {
    return parse_classifier_config(preset_text(name));
}

ClassifierConfig parse_classifier_config(const std::string& text) {
    ClassifierConfig config;
    std::istringstream in(text);
    std::string line;
    std::string tree_text;
    bool in_tree = false;
    while (std::getline(in, line)) {
        if (in_tree) {
            tree_text += '\n';
            tree_text += line;
            continue;
        }
        const std::string stripped = strip_comment(line);
        const std::vector<std::string> words = split_words(stripped);
        if (words.empty()) continue;
        const std::string& directive = words[0];
        if (directive == "name") {
            if (words.size() != 2) throw ConfigInvalid("name directive takes one value");
            config.name = words[1];
        } else if (directive == "warmup") {
            if (words.size() != 2) throw ConfigInvalid("warmup directive takes one value");
            config.warmup_frames = static_cast<std::uint32_t>(parse_count(words[1], "warmup"));
        } else if (directive == "window_short") {
            if (words.size() != 2) throw ConfigInvalid("window_short directive takes one value");
            config.features.window_short = parse_count(words[1], "window_short");
        } else if (directive == "window_long") {
            if (words.size() != 2) throw ConfigInvalid("window_long directive takes one value");
            config.features.window_long = parse_count(words[1], "window_long");
        } else if (directive == "variance_floor") {
            if (words.size() != 2) throw ConfigInvalid("variance_floor directive takes one value");
            config.features.variance_floor = parse_real(words[1], "variance_floor");
        } else if (directive == "policy") {
            if (words.size() != 2) throw ConfigInvalid("policy directive takes one value");
            if (words[1] == "exclude_flagged")
                config.features.policy = WindowPolicy::ExcludeFlagged;
            else if (words[1] == "include_all")
                config.features.policy = WindowPolicy::IncludeAll;
            else
                throw ConfigInvalid("unknown window policy '" + words[1] + "'");
        } else if (directive == "const") {
            if (words.size() != 3 && words.size() != 4)
                throw ConfigInvalid("const directive takes a name, a value, and optionally 'free'");
            ConstantDef def;
            def.name = words[1];
            def.value = parse_real(words[2], "const");
            if (words.size() == 4) {
                if (words[3] != "free")
                    throw ConfigInvalid("unknown const qualifier '" + words[3] + "'");
                def.free = true;
            }
            if (config.find_constant(def.name))
                throw ConfigInvalid("constant '" + def.name + "' defined twice");
            config.constants.push_back(std::move(def));
        } else if (directive == "tree") {
            const auto at = line.find("tree");
            tree_text = line.substr(at + 4);
            in_tree = true;
        } else {
            throw ConfigInvalid("unknown directive '" + directive + "'");
        }
    }
    if (tree_text.empty()) throw ConfigInvalid("config has no tree directive");

    const std::vector<std::string> tokens = tokenize_sexpr(tree_text);
    std::size_t pos = 0;
    const SExpr root = read_sexpr(tokens, pos);
    if (pos != tokens.size()) throw ConfigInvalid("trailing tokens after tree expression");

    int auto_label = 0;
    const DecisionBranch root_branch = build_branch(root, config.nodes, auto_label);
    if (root_branch.is_leaf())
        throw ConfigInvalid("tree must have at least one decision node");

    for (const auto& def : config.constants)
        for (auto& node : config.nodes) bind_constant(node.guard, def.name, def.value);

    validate_config(config);
    return config;
}

ClassifierConfig load_classifier_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_classifier_config(buffer.str());
}

std::string format_classifier_config(const ClassifierConfig& config,
                                     std::span<const std::string> calibrated) {
    std::ostringstream out;
    out.precision(17);
    out << "name " << config.name << '\n';
    out << "warmup " << config.warmup_frames << '\n';
    out << "window_short " << config.features.window_short << '\n';
    out << "window_long " << config.features.window_long << '\n';
    out << "policy "
        << (config.features.policy == WindowPolicy::ExcludeFlagged ? "exclude_flagged"
                                                                   : "include_all")
        << '\n';
    for (const auto& def : config.constants) {
        out << "const " << def.name << ' ' << def.value;
        if (def.free) out << " free";
        const bool was_calibrated =
            std::find(calibrated.begin(), calibrated.end(), def.name) != calibrated.end();
        out << (was_calibrated ? "  # calibrated" : "  # fixed") << '\n';
    }
    out << "tree ";
    std::ostringstream tree;
    DecisionBranch root;
    root.node = 0;
    format_branch(tree, config, root, 0);
    out << tree.str() << '\n';
    return out.str();
}

void save_classifier_config(const std::filesystem::path& path, const ClassifierConfig& config,
                            std::span<const std::string> calibrated) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << format_classifier_config(config, calibrated);
    if (!out) throw IoError("write failed on " + path.string());
}

void rebind_constant(ClassifierConfig& config, const std::string& name, double value) {
    bool found = false;
    for (auto& def : config.constants)
        if (def.name == name) {
            def.value = value;
            found = true;
        }
    if (!found) throw ConfigInvalid("no constant named '" + name + "'");
    for (auto& node : config.nodes) bind_constant(node.guard, name, value);
}

void write_verdicts(const std::filesystem::path& path, std::span<const Verdict> verdicts) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& v : verdicts)
        out << v.frame_index << ' ' << (v.is_interjection ? "interjection" : "clean") << ' '
            << (v.fired_rule.empty() ? "-" : v.fired_rule) << '\n';
    if (!out) throw IoError("write failed on " + path.string());
}

std::vector<Verdict> read_verdicts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<Verdict> verdicts;
    std::string line;
    while (std::getline(in, line)) {
        const std::vector<std::string> words = split_words(strip_comment(line));
        if (words.empty()) continue;
        if (words.size() < 2) throw ConfigInvalid("malformed verdict line: " + line);
        Verdict v;
        v.frame_index = static_cast<std::uint32_t>(parse_count(words[0], "verdict line"));
        if (words[1] == "interjection")
            v.is_interjection = true;
        else if (words[1] == "clean")
            v.is_interjection = false;
        else
            throw ConfigInvalid("unknown verdict '" + words[1] + "'");
        if (words.size() > 2 && words[2] != "-") v.fired_rule = words[2];
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

} // namespace cutguard
