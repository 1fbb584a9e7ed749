use fluxlink::circuit::{build_system, dress_spectrum, system_levels, BareLabel, DeviceParams, SystemOptions, Truncation};

// Growing any one truncation by 5 moves the qubit and sideband lines by < 0.1 MHz.
#[test]
fn truncation_is_converged_at_the_default_dims() {
    let params = DeviceParams::table1();
    let base = SystemOptions::default();
    let spectrum = dress_spectrum(&build_system(&params, &base).unwrap(), 8).unwrap();
    let e0 = spectrum.state(BareLabel::E0).unwrap().index;
    let g1 = spectrum.state(BareLabel::G1).unwrap().index;
    let reference = [spectrum.eigenvalues[e0], spectrum.eigenvalues[g1]];

    let Truncation { fluxonium, snail, resonator } = base.dims;
    for dims in [
        Truncation { fluxonium: fluxonium + 5, snail, resonator },
        Truncation { fluxonium, snail: snail + 5, resonator },
        Truncation { fluxonium, snail, resonator: resonator + 5 },
    ] {
        let levels = system_levels(&params, &SystemOptions { dims, ..base }).unwrap();
        for (name, idx, before) in [("g0->e0", e0, reference[0]), ("g0->g1", g1, reference[1])] {
            let shift_mhz = (levels[idx] - before).abs() * 1e3;
            assert!(shift_mhz < 0.1, "{name} moved {shift_mhz:.4} MHz at {dims:?}");
        }
    }
}
