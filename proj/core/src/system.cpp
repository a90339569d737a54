#include "gridformer/system.hpp"

namespace gridformer {

LineParams thevenin_line(const NetworkModel& net, int device_bus) {
    if (device_bus < 0 || device_bus >= net.n_devices())
        throw DimensionMismatch("thevenin_line expects a device bus");
    const Eigen::MatrixXd B_red =
        kron_reduce(static_b_matrix(net), net.interior_buses());
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B_red);
    if (!(lu.rcond() > 1e-12))
        throw SingularBMatrix("network has no ground reference");
    const Eigen::MatrixXd Z = lu.inverse();
    LineParams line;
    line.L_g = net.capacities()[static_cast<std::size_t>(device_bus)] *
               Z(device_bus, device_bus);
    line.tau = net.mean_tau();
    line.omega0 = net.omega0();
    if (!(line.L_g > 0.0))
        throw SingularBMatrix("nonpositive Thevenin inductance at device bus");
    return line;
}

SystemModel build_system(const NetworkModel& net, std::vector<DeviceAtBus> devices) {
    if (static_cast<int>(devices.size()) != net.n_devices())
        throw DimensionMismatch("one device entry per device bus required");
    SystemModel sys{net, std::move(devices), {}, {}};
    sys.ops.reserve(sys.devices.size());
    sys.models.reserve(sys.devices.size());
    for (int k = 0; k < net.n_devices(); ++k) {
        const DeviceAtBus& dev = sys.devices[static_cast<std::size_t>(k)];
        OperatingPoint op;
        if (dev.spec.arch() == Architecture::None) {
            op = OperatingPoint{}; // no-load
        } else {
            const LineParams line = thevenin_line(net, k);
            op = solve_operating_point(dev.p_ref, dev.qv_ref, dev.spec.ref_mode(),
                                       line, 1.0);
        }
        sys.ops.push_back(op);
        sys.models.push_back(build_admittance(dev.spec, op, net.omega0()));
    }
    return sys;
}

} // namespace gridformer
