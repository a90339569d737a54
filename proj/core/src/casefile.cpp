#include "gridformer/casefile.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gridformer {

namespace {

using nlohmann::json;

json params_to_json(const DeviceSpec& spec) {
    json p = json::object();
    switch (spec.arch()) {
    case Architecture::PllPq: {
        const auto& v = std::get<PllPqParams>(spec.params);
        p = {{"pll_bw_hz", v.pll_bw_hz}, {"zeta", v.zeta},   {"kp_p", v.kp_p},
             {"ki_p", v.ki_p},           {"kp_q", v.kp_q},   {"ki_q", v.ki_q},
             {"tau_i", v.tau_i}};
        break;
    }
    case Architecture::PllPv: {
        const auto& v = std::get<PllPvParams>(spec.params);
        p = {{"pll_bw_hz", v.pll_bw_hz}, {"zeta", v.zeta},   {"kp_p", v.kp_p},
             {"ki_p", v.ki_p},           {"kp_v", v.kp_v},   {"ki_v", v.ki_v},
             {"tau_i", v.tau_i}};
        break;
    }
    case Architecture::Vsg: {
        const auto& v = std::get<VsgParams>(spec.params);
        p = {{"inertia", v.inertia},
             {"damping", v.damping},
             {"virtual_l", v.virtual_l},
             {"virtual_tau", v.virtual_tau}};
        break;
    }
    case Architecture::Droop: {
        const auto& v = std::get<DroopParams>(spec.params);
        p = {{"damping", v.damping},
             {"virtual_l", v.virtual_l},
             {"virtual_tau", v.virtual_tau}};
        break;
    }
    case Architecture::Voc: {
        const auto& v = std::get<VocParams>(spec.params);
        p = {{"eta", v.eta},
             {"lambda_a", v.lambda_a},
             {"k_q", v.k_q},
             {"filter_l", v.filter_l},
             {"filter_tau", v.filter_tau}};
        break;
    }
    case Architecture::PllGfm: {
        const auto& v = std::get<PllGfmParams>(spec.params);
        p = {{"virtual_y", v.virtual_y}, {"virtual_tau", v.virtual_tau},
             {"pll_bw_hz", v.pll_bw_hz}, {"zeta", v.zeta},
             {"kp_p", v.kp_p},           {"ki_p", v.ki_p},
             {"tau_i", v.tau_i}};
        break;
    }
    case Architecture::None:
        break;
    }
    return p;
}

DeviceSpec spec_from_json(const std::string& arch_name, const json& p, double capacity) {
    DeviceSpec spec;
    spec.capacity = capacity;
    const Architecture arch = architecture_from_string(arch_name);
    switch (arch) {
    case Architecture::PllPq: {
        PllPqParams v;
        v.pll_bw_hz = p.value("pll_bw_hz", v.pll_bw_hz);
        v.zeta = p.value("zeta", v.zeta);
        v.kp_p = p.value("kp_p", v.kp_p);
        v.ki_p = p.value("ki_p", v.ki_p);
        v.kp_q = p.value("kp_q", v.kp_q);
        v.ki_q = p.value("ki_q", v.ki_q);
        v.tau_i = p.value("tau_i", v.tau_i);
        spec.params = v;
        break;
    }
    case Architecture::PllPv: {
        PllPvParams v;
        v.pll_bw_hz = p.value("pll_bw_hz", v.pll_bw_hz);
        v.zeta = p.value("zeta", v.zeta);
        v.kp_p = p.value("kp_p", v.kp_p);
        v.ki_p = p.value("ki_p", v.ki_p);
        v.kp_v = p.value("kp_v", v.kp_v);
        v.ki_v = p.value("ki_v", v.ki_v);
        v.tau_i = p.value("tau_i", v.tau_i);
        spec.params = v;
        break;
    }
    case Architecture::Vsg: {
        VsgParams v;
        v.inertia = p.value("inertia", v.inertia);
        v.damping = p.value("damping", v.damping);
        v.virtual_l = p.value("virtual_l", v.virtual_l);
        v.virtual_tau = p.value("virtual_tau", v.virtual_tau);
        spec.params = v;
        break;
    }
    case Architecture::Droop: {
        DroopParams v;
        v.damping = p.value("damping", v.damping);
        v.virtual_l = p.value("virtual_l", v.virtual_l);
        v.virtual_tau = p.value("virtual_tau", v.virtual_tau);
        spec.params = v;
        break;
    }
    case Architecture::Voc: {
        VocParams v;
        v.eta = p.value("eta", v.eta);
        v.lambda_a = p.value("lambda_a", v.lambda_a);
        v.k_q = p.value("k_q", v.k_q);
        v.filter_l = p.value("filter_l", v.filter_l);
        v.filter_tau = p.value("filter_tau", v.filter_tau);
        spec.params = v;
        break;
    }
    case Architecture::PllGfm: {
        PllGfmParams v;
        v.virtual_y = p.value("virtual_y", v.virtual_y);
        v.virtual_tau = p.value("virtual_tau", v.virtual_tau);
        v.pll_bw_hz = p.value("pll_bw_hz", v.pll_bw_hz);
        v.zeta = p.value("zeta", v.zeta);
        v.kp_p = p.value("kp_p", v.kp_p);
        v.ki_p = p.value("ki_p", v.ki_p);
        v.tau_i = p.value("tau_i", v.tau_i);
        spec.params = v;
        break;
    }
    case Architecture::None:
        spec.params = NoneParams{};
        break;
    }
    spec.validate();
    return spec;
}

} // namespace

CaseFile CaseFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InvalidCaseFile("cannot open case file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

CaseFile CaseFile::parse(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw InvalidCaseFile(std::string("JSON parse failure: ") + e.what());
    }
    try {
        CaseFile c;
        c.version = j.at("version").get<int>();
        const json& sys = j.at("system");
        c.omega0_hz = sys.at("omega0_hz").get<double>();
        c.tau_default = sys.value("tau_default", 0.1);
        for (const json& bj : j.at("buses"))
            c.buses.push_back({bj.at("id").get<int>(), bj.at("kind").get<std::string>()});
        for (const json& br : j.at("branches")) {
            CaseBranch cb;
            cb.from_id = br.at("from").get<int>();
            cb.to_id = br.at("to").get<int>();
            cb.b = br.at("b_pu").get<double>();
            if (br.contains("tau"))
                cb.tau = br.at("tau").get<double>();
            c.branches.push_back(cb);
        }
        if (j.contains("devices")) {
            for (const json& dj : j.at("devices")) {
                Device dev;
                dev.bus_id = dj.at("bus").get<int>();
                dev.spec = spec_from_json(dj.at("arch").get<std::string>(),
                                          dj.value("params", json::object()),
                                          dj.value("capacity_pu", 1.0));
                dev.p0 = dj.value("p0_pu", 0.5);
                dev.qv0 = dj.value("q0_or_v0_pu", 1.0);
                c.devices.push_back(dev);
            }
        }
        const json& sweep = j.at("sweep");
        c.f_min_hz = sweep.at("f_min_hz").get<double>();
        c.f_max_hz = sweep.at("f_max_hz").get<double>();
        c.sweep_points = sweep.at("points").get<int>();
        if (j.contains("band")) {
            c.band_lo_hz = j["band"].value("f_lo_hz", 5.0);
            c.band_hi_hz = j["band"].value("f_hi_hz", 200.0);
        }
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw InvalidCaseFile(std::string("case schema violation: ") + e.what());
    }
}

std::string CaseFile::to_json_string() const {
    json j;
    j["version"] = version;
    j["system"] = {{"omega0_hz", omega0_hz}, {"tau_default", tau_default}};
    j["buses"] = json::array();
    for (const Bus& b : buses)
        j["buses"].push_back({{"id", b.id}, {"kind", b.kind}});
    j["branches"] = json::array();
    for (const CaseBranch& br : branches) {
        json bj = {{"from", br.from_id}, {"to", br.to_id}, {"b_pu", br.b}};
        if (br.tau)
            bj["tau"] = *br.tau;
        j["branches"].push_back(bj);
    }
    j["devices"] = json::array();
    for (const Device& d : devices) {
        j["devices"].push_back({{"bus", d.bus_id},
                                {"arch", to_string(d.spec.arch())},
                                {"params", params_to_json(d.spec)},
                                {"capacity_pu", d.spec.capacity},
                                {"p0_pu", d.p0},
                                {"q0_or_v0_pu", d.qv0}});
    }
    j["sweep"] = {{"f_min_hz", f_min_hz}, {"f_max_hz", f_max_hz}, {"points", sweep_points}};
    j["band"] = {{"f_lo_hz", band_lo_hz}, {"f_hi_hz", band_hi_hz}};
    return j.dump(2);
}

void CaseFile::validate() const {
    if (version < 1)
        throw InvalidCaseFile("version field must be >= 1");
    if (!(f_min_hz > 0.0) || !(f_max_hz > f_min_hz))
        throw InvalidCaseFile("sweep needs 0 < f_min < f_max");
    if (sweep_points < 50)
        throw InvalidCaseFile("sweep needs at least 50 points");
    if (!(omega0_hz > 0.0))
        throw InvalidCaseFile("nominal frequency must be positive");

    int n_ground = 0, n_device = 0;
    std::vector<int> ids;
    for (const Bus& b : buses) {
        if (b.kind == "ground")
            ++n_ground;
        else if (b.kind == "device")
            ++n_device;
        else if (b.kind != "interior")
            throw InvalidCaseFile("bus kind must be device, interior or ground");
        ids.push_back(b.id);
    }
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw InvalidCaseFile("duplicate bus id");
    if (n_ground != 1)
        throw InvalidCaseFile("exactly one ground bus required");
    if (n_device < 1)
        throw InvalidCaseFile("at least one device bus required");

    std::vector<int> seen;
    for (const Device& d : devices) {
        const auto it = std::find_if(buses.begin(), buses.end(),
                                     [&](const Bus& b) { return b.id == d.bus_id; });
        if (it == buses.end() || it->kind != "device")
            throw InvalidCaseFile("device entry must reference a device bus");
        if (std::find(seen.begin(), seen.end(), d.bus_id) != seen.end())
            throw InvalidCaseFile("multiple devices at one bus");
        seen.push_back(d.bus_id);
    }
}

std::vector<int> CaseFile::ordered_ids() const {
    std::vector<int> dev, interior, ground;
    for (const Bus& b : buses) {
        if (b.kind == "device")
            dev.push_back(b.id);
        else if (b.kind == "interior")
            interior.push_back(b.id);
        else
            ground.push_back(b.id);
    }
    std::sort(dev.begin(), dev.end());
    std::sort(interior.begin(), interior.end());
    dev.insert(dev.end(), interior.begin(), interior.end());
    dev.insert(dev.end(), ground.begin(), ground.end());
    return dev;
}

int CaseFile::internal_index(int bus_id) const {
    const std::vector<int> order = ordered_ids();
    const auto it = std::find(order.begin(), order.end(), bus_id);
    if (it == order.end())
        throw InvalidCaseFile("unknown bus id " + std::to_string(bus_id));
    return static_cast<int>(it - order.begin());
}

int CaseFile::bus_id_of(int internal) const {
    const std::vector<int> order = ordered_ids();
    if (internal < 0 || internal >= static_cast<int>(order.size()))
        throw InvalidCaseFile("internal bus index out of range");
    return order[static_cast<std::size_t>(internal)];
}

NetworkModel CaseFile::network() const {
    int n_device = 0, n_interior = 0;
    for (const Bus& b : buses) {
        if (b.kind == "device")
            ++n_device;
        else if (b.kind == "interior")
            ++n_interior;
    }
    std::vector<Branch> net_branches;
    for (const CaseBranch& br : branches) {
        Branch b;
        b.from = internal_index(br.from_id);
        b.to = internal_index(br.to_id);
        b.b = br.b;
        b.tau = br.tau.value_or(tau_default);
        // keep ground on the `to` side
        if (b.from == n_device + n_interior)
            std::swap(b.from, b.to);
        net_branches.push_back(b);
    }
    std::vector<double> caps(static_cast<std::size_t>(n_device), 1.0);
    for (const Device& d : devices)
        caps[static_cast<std::size_t>(internal_index(d.bus_id))] = d.spec.capacity;
    return {n_device, n_interior, std::move(net_branches), std::move(caps),
            2.0 * 3.14159265358979323846 * omega0_hz};
}

FrequencyGrid CaseFile::sweep_grid() const {
    return FrequencyGrid::log_space(f_min_hz, f_max_hz, sweep_points);
}

SystemModel CaseFile::system() const {
    const NetworkModel net = network();
    std::vector<DeviceAtBus> entries(static_cast<std::size_t>(net.n_devices()));
    for (const Device& d : devices) {
        DeviceAtBus& e = entries[static_cast<std::size_t>(internal_index(d.bus_id))];
        e.spec = d.spec;
        e.p_ref = d.p0;
        e.qv_ref = d.qv0;
    }
    return build_system(net, std::move(entries));
}

} // namespace gridformer
