#include "actrec/model_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace actrec {

using json = nlohmann::ordered_json;

namespace {

json gaussians_json(const std::vector<DiagGaussian>& gs) {
    json arr = json::array();
    for (const auto& g : gs) arr.push_back(json{{"mean", g.mean}, {"var", g.var}});
    return arr;
}

std::vector<DiagGaussian> gaussians_from(const json& arr) {
    std::vector<DiagGaussian> out;
    for (const auto& g : arr) {
        DiagGaussian d;
        d.mean = g.at("mean").get<std::vector<double>>();
        d.var = g.at("var").get<std::vector<double>>();
        out.push_back(std::move(d));
    }
    return out;
}

json dbn_json(const DbnParams& p) {
    return json{{"phase_prior", p.phase_prior},   {"phase_trans", p.phase_trans},
                {"motion_prior", p.motion_prior}, {"motion_trans", p.motion_trans},
                {"geo_emit", gaussians_json(p.geo_emit)},
                {"mot_emit", gaussians_json(p.mot_emit)}};
}

DbnParams dbn_from(const json& j) {
    DbnParams p;
    p.phase_prior = j.at("phase_prior").get<std::vector<double>>();
    p.phase_trans = j.at("phase_trans").get<std::vector<std::vector<double>>>();
    p.motion_prior = j.at("motion_prior").get<std::vector<double>>();
    p.motion_trans = j.at("motion_trans").get<std::vector<std::vector<std::vector<double>>>>();
    p.geo_emit = gaussians_from(j.at("geo_emit"));
    p.mot_emit = gaussians_from(j.at("mot_emit"));
    return p;
}

json hmm_json(const HmmParams& p) {
    return json{{"prior", p.prior}, {"trans", p.trans}, {"emit", gaussians_json(p.emit)}};
}

HmmParams hmm_from(const json& j) {
    HmmParams p;
    p.prior = j.at("prior").get<std::vector<double>>();
    p.trans = j.at("trans").get<std::vector<std::vector<double>>>();
    p.emit = gaussians_from(j.at("emit"));
    return p;
}

}  // namespace

std::string bank_to_json(const ModelBank& bank) {
    bank.validate();
    json doc;
    doc["format_version"] = kBankFormatVersion;
    doc["kind"] = model_kind_name(bank.kind);
    doc["fingerprint"] = bank.fingerprint;
    doc["var_floor"] = bank.var_floor;
    doc["window"] = json{{"stride", bank.window.stride},
                         {"cap", bank.window.cap},
                         {"trajectory_roi", roi_name(bank.window.trajectory_roi)},
                         {"trajectory_fused", bank.window.trajectory_fused}};
    doc["class_prior"] = bank.prior.p;

    doc["models"] = json::array();
    for (ActivityClass c : all_classes())
        for (RoiKind r : all_rois()) {
            json cell;
            cell["class"] = class_name(c);
            cell["roi"] = roi_name(r);
            if (bank.kind == ModelKind::Dbn)
                cell["params"] = dbn_json(bank.dbn[ModelBank::cell(c, r)]);
            else
                cell["params"] = hmm_json(bank.hmm[ModelBank::cell(c, r)]);
            doc["models"].push_back(std::move(cell));
        }
    return doc.dump(2) + "\n";
}

void save_bank(const ModelBank& bank, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << bank_to_json(bank);
    if (!out) throw IoError("write failed: " + path);
}

ModelBank bank_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw CorruptModel(std::string("malformed model bank: ") + e.what());
    }

    try {
        if (!doc.contains("format_version") ||
            doc["format_version"].get<int>() != kBankFormatVersion)
            throw SchemaVersionMismatch("unsupported model bank format version");

        ModelBank bank;
        bank.kind = model_kind_from_name(doc.at("kind").get<std::string>());
        bank.fingerprint = doc.at("fingerprint").get<std::string>();
        bank.var_floor = doc.at("var_floor").get<double>();
        const json& w = doc.at("window");
        bank.window.stride = w.at("stride").get<int>();
        bank.window.cap = w.at("cap").get<int>();
        bank.window.trajectory_roi = roi_from_name(w.at("trajectory_roi").get<std::string>());
        bank.window.trajectory_fused = w.at("trajectory_fused").get<bool>();
        const auto prior = doc.at("class_prior").get<std::vector<double>>();
        if (prior.size() != kNumClasses) throw CorruptModel("class prior size");
        std::copy(prior.begin(), prior.end(), bank.prior.p.begin());

        const json& models = doc.at("models");
        const std::size_t expected = static_cast<std::size_t>(kNumClasses) * kNumRois;
        if (models.size() != expected) throw CorruptModel("wrong number of models in bank");
        if (bank.kind == ModelKind::Dbn)
            bank.dbn.resize(expected);
        else
            bank.hmm.resize(expected);
        for (const auto& cell : models) {
            const ActivityClass c = class_from_name(cell.at("class").get<std::string>());
            const RoiKind r = roi_from_name(cell.at("roi").get<std::string>());
            if (bank.kind == ModelKind::Dbn)
                bank.dbn[ModelBank::cell(c, r)] = dbn_from(cell.at("params"));
            else
                bank.hmm[ModelBank::cell(c, r)] = hmm_from(cell.at("params"));
        }

        try {
            bank.validate();
        } catch (const ValidationError& e) {
            throw CorruptModel(e.what());
        }
        return bank;
    } catch (const json::exception& e) {
        throw CorruptModel(std::string("malformed model bank: ") + e.what());
    }
}

ModelBank load_bank(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return bank_from_json(text);
}

}  // namespace actrec
