#include "etairl/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace etairl {

namespace {

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Vector vector_from_json(const json& doc) {
    if (!doc.is_array()) throw ParseError("expected an array of numbers");
    Vector v(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) v(i) = doc[i].get<double>();
    return v;
}

}  // namespace

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& doc) {
    if (!doc.is_array() || doc.empty() || !doc[0].is_array())
        throw ParseError("expected a 2-D array");
    Matrix m(doc.size(), doc[0].size());
    for (std::size_t r = 0; r < doc.size(); ++r) {
        if (doc[r].size() != doc[0].size()) throw ParseError("ragged 2-D array");
        for (std::size_t c = 0; c < doc[r].size(); ++c) m(r, c) = doc[r][c].get<double>();
    }
    return m;
}

json mdp_to_json(const FiniteMdp& mdp) {
    json trans = json::array();
    for (int s = 0; s < mdp.n_states; ++s) {
        json per_action = json::array();
        for (int a = 0; a < mdp.n_actions; ++a) {
            json row = json::array();
            for (int s2 = 0; s2 < mdp.n_states; ++s2) row.push_back(mdp.trans(s, a, s2));
            per_action.push_back(std::move(row));
        }
        trans.push_back(std::move(per_action));
    }
    return json{{"n_states", mdp.n_states}, {"n_actions", mdp.n_actions},
                {"transition", std::move(trans)}, {"cost", matrix_to_json(mdp.cost)},
                {"gamma", mdp.gamma}, {"p0", vector_to_json(mdp.p0)}};
}

FiniteMdp mdp_from_json(const json& doc) {
    try {
        FiniteMdp mdp;
        mdp.n_states = doc.at("n_states").get<int>();
        mdp.n_actions = doc.at("n_actions").get<int>();
        mdp.gamma = doc.at("gamma").get<double>();
        mdp.cost = matrix_from_json(doc.at("cost"));
        mdp.p0 = vector_from_json(doc.at("p0"));
        const json& trans = doc.at("transition");
        if (static_cast<int>(trans.size()) != mdp.n_states)
            throw ParseError("transition outer dimension must be n_states");
        mdp.transition.assign(mdp.n_actions, Matrix::Zero(mdp.n_states, mdp.n_states));
        for (int s = 0; s < mdp.n_states; ++s) {
            if (static_cast<int>(trans[s].size()) != mdp.n_actions)
                throw ParseError("transition middle dimension must be n_actions");
            for (int a = 0; a < mdp.n_actions; ++a) {
                if (static_cast<int>(trans[s][a].size()) != mdp.n_states)
                    throw ParseError("transition inner dimension must be n_states");
                for (int s2 = 0; s2 < mdp.n_states; ++s2)
                    mdp.transition[a](s, s2) = trans[s][a][s2].get<double>();
            }
        }
        return mdp;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad mdp document: ") + e.what());
    }
}

json policy_to_json(const Policy& pi) { return json{{"probs", matrix_to_json(pi.probs)}}; }

Policy policy_from_json(const json& doc) {
    try {
        return Policy{matrix_from_json(doc.at("probs"))};
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad policy document: ") + e.what());
    }
}

json horizon_to_json(const HorizonDistribution& eta) {
    json doc;
    switch (eta.kind()) {
        case HorizonKind::Dirac: doc["kind"] = "dirac"; break;
        case HorizonKind::Geometric: doc["kind"] = "geometric"; break;
        case HorizonKind::Poisson: doc["kind"] = "poisson"; break;
        case HorizonKind::Uniform: doc["kind"] = "uniform"; break;
        case HorizonKind::Custom: doc["kind"] = "custom"; break;
    }
    doc["param"] = eta.param();
    doc["truncation"] = eta.truncation();
    if (eta.kind() == HorizonKind::Custom) doc["pmf"] = eta.weights();
    return doc;
}

HorizonDistribution horizon_from_json(const json& doc) {
    try {
        const std::string kind = doc.at("kind").get<std::string>();
        const int truncation = doc.value("truncation", -1);
        if (kind == "dirac")
            return HorizonDistribution::dirac(static_cast<int>(doc.value("param", 0.0)), truncation);
        if (kind == "geometric")
            return HorizonDistribution::geometric(doc.at("param").get<double>(), truncation);
        if (kind == "poisson")
            return HorizonDistribution::poisson(doc.at("param").get<double>(), truncation);
        if (kind == "uniform")
            return HorizonDistribution::uniform(doc.at("param").get<int>());
        if (kind == "custom")
            return HorizonDistribution::custom(doc.at("pmf").get<std::vector<double>>());
        throw ParseError("unknown horizon kind: " + kind);
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad horizon spec: ") + e.what());
    }
}

std::string trajectory_to_jsonl(const Trajectory& tau) {
    return json{{"states", tau.states}, {"actions", tau.actions}, {"costs", tau.costs}}.dump();
}

Trajectory trajectory_from_jsonl(const std::string& line) {
    try {
        const json doc = json::parse(line);
        Trajectory tau;
        tau.states = doc.at("states").get<std::vector<int>>();
        tau.actions = doc.at("actions").get<std::vector<int>>();
        tau.costs = doc.at("costs").get<std::vector<double>>();
        if (tau.states.size() != tau.actions.size() || tau.states.size() != tau.costs.size())
            throw ParseError("trajectory field lengths differ");
        return tau;
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad trajectory line: ") + e.what());
    }
}

void save_buffer_jsonl(const ReplayBuffer& buffer, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (const auto& tau : buffer.trajectories()) out << trajectory_to_jsonl(tau) << '\n';
}

ReplayBuffer load_buffer_jsonl(const std::string& path, std::size_t capacity) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    ReplayBuffer buffer(capacity);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        buffer.push(trajectory_from_jsonl(line));
    }
    return buffer;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::string occupancy_to_csv(const OccupancyMeasure& m, int n_states, int n_actions) {
    std::ostringstream out;
    out << "s0,s,a,value\n";
    for (int r = 0; r < m.values.rows(); ++r)
        for (int s = 0; s < n_states; ++s)
            for (int a = 0; a < n_actions; ++a)
                out << r << ',' << s << ',' << a << ','
                    << format_double(m.values(r, s * n_actions + a)) << '\n';
    return out.str();
}

json discriminator_to_json(const Discriminator& d) {
    json doc;
    doc["kind"] = d.kind == Discriminator::Kind::Tabular ? "tabular" : "linear_logistic";
    if (d.kind == Discriminator::Kind::Tabular)
        doc["logits"] = matrix_to_json(d.logits);
    else
        doc["weights"] = vector_to_json(d.weights);
    return doc;
}

json generator_to_json(const ConditionalGenerator& g) {
    return json{{"probs", matrix_to_json(g.probs)}};
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
}

}  // namespace etairl
