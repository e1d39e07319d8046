#include "superint/model.hpp"

#include <cmath>
#include <sstream>

#include "superint/errors.hpp"

namespace superint {

bool is_central(const Model& model) { return std::holds_alternative<Central>(model.angular); }

const AngularFamily& family_of(const Model& model)
{
    const auto* fam = std::get_if<AngularFamily>(&model.angular);
    if (!fam) throw DomainError("model has no angular family (central potential)");
    return *fam;
}

int model_m(const Model& model)
{
    if (const auto* c = std::get_if<Central>(&model.angular)) return c->m;
    return std::get<AngularFamily>(model.angular).m;
}

int model_n(const Model& model)
{
    if (const auto* c = std::get_if<Central>(&model.angular)) return c->n;
    return std::get<AngularFamily>(model.angular).n;
}

double angular_c(const Model& model, double phi)
{
    if (is_central(model)) return 0.0;
    return angular_value(family_of(model), phi);
}

double angular_c_prime(const Model& model, double phi)
{
    if (is_central(model)) return 0.0;
    return angular_derivative(family_of(model), phi);
}

double angular_floor(const Model& model)
{
    if (is_central(model)) return 0.0;
    return family_of(model).c0;
}

ValidationReport validate_model(const Model& model)
{
    ValidationReport rep;
    if (!std::isfinite(model.curv.k)) rep.violations.push_back("curvature must be finite");
    try {
        check_radial(model.radial);
    } catch (const DomainError& e) {
        rep.violations.push_back(e.what());
    }
    if (const auto* c = std::get_if<Central>(&model.angular)) {
        if (c->m <= 0 || c->n <= 0) rep.violations.push_back("m and n must be positive integers");
        return rep;
    }
    const AngularFamily& fam = family_of(model);
    const ValidationReport fr = validate_family(fam);
    rep.violations.insert(rep.violations.end(), fr.violations.begin(), fr.violations.end());
    rep.notes.insert(rep.notes.end(), fr.notes.begin(), fr.notes.end());

    std::ostringstream os;
    os.precision(17);
    if (const auto* link = std::get_if<OscillatorLink>(&fam.link)) {
        if (const auto* osc = std::get_if<Oscillator>(&model.radial)) {
            if (osc->gamma != link->gamma) {
                os << "link gamma " << link->gamma << " differs from radial gamma " << osc->gamma;
                rep.notes.push_back(os.str());
            }
        } else if (const auto* kep = std::get_if<GeneralizedKepler>(&model.radial)) {
            if (kep->F != 0 || kep->B != link->gamma) {
                os << "oscillator link with gamma " << link->gamma << " does not match " << describe(model.radial);
                rep.notes.push_back(os.str());
            }
        }
    } else {
        const auto& klink = std::get<KeplerLink>(fam.link);
        const auto* kep = std::get_if<GeneralizedKepler>(&model.radial);
        if (!kep || kep->B != klink.B || kep->F != klink.F) {
            os << "Kepler link (B=" << klink.B << ", F=" << klink.F << ") does not match " << describe(model.radial);
            rep.notes.push_back(os.str());
        }
    }
    return rep;
}

}  // namespace superint
