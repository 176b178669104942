//! Integrals, SCF energies and sector spectra against values computed
//! independently with PySCF (STO-6G, Ångström input).

use rlcqe::chem::{build_integrals, run_rhf, spin_orbital_integrals, sto6g_basis, Geometry};
use rlcqe::qubits::{jw_hamiltonian, Sector};

mod common;

struct Reference {
    geometry: Geometry,
    e_nuc: f64,
    e_hf: f64,
    s01: f64,
    t01: f64,
    v00: f64,
    eri: [f64; 4],
    sector: &'static [f64],
}

fn references() -> Vec<Reference> {
    vec![
        Reference {
            geometry: Geometry::h2(0.7).unwrap(),
            e_nuc: 0.755967444171429,
            e_hf: -1.126100302865754,
            s01: 0.6859366001450999,
            t01: 0.2598836564719003,
            v00: -1.9204586571157682,
            eri: [0.774998521297643, 0.585138229981871, 0.324554569033569, 0.467450775253427],
            sector: &[-1.144979079498, -0.486698335318, -0.128126993635, 0.576518060316],
        },
        Reference {
            geometry: Geometry::h2(1.2).unwrap(),
            e_nuc: 0.440981009100000,
            e_hf: -1.012222339726322,
            s01: 0.3874275514738548,
            t01: 0.05430320006894436,
            v00: -1.6744712649420748,
            eri: [0.774998521297643, 0.417889288370214, 0.091425003974567, 0.227047203345865],
            sector: &[-1.064295738319, -0.838454989385, -0.418276994143, -0.164622833764],
        },
        Reference {
            geometry: Geometry::h2(3.0).unwrap(),
            e_nuc: 0.176392403640000,
            e_hf: -0.665656507590968,
            s01: 0.02169149949327092,
            t01: -0.005688307889835915,
            v00: -1.4159525680034795,
            eri: [0.774998521297643, 0.176377855347269, 0.000198455120643, 0.007914727319218],
            sector: &[-0.942561431444, -0.941801514795, -0.342899052569, -0.341823191205],
        },
        Reference {
            geometry: Geometry::h3_plus(1.7).unwrap(),
            e_nuc: 0.778201780764706,
            e_hf: -0.984394593997707,
            s01: 0.19128424665648935,
            t01: -0.004332468681301459,
            v00: -1.7059451815045692,
            eri: [0.774998521297643, 0.308160565027627, 0.019825939484386, 0.096674680031746],
            sector: &[
                -1.070385500390,
                -1.036442716272,
                -0.933053481285,
                -0.892504537044,
                -0.835574017957,
                -0.782882956766,
                -0.475083260450,
                -0.247202245806,
                -0.234664884264,
            ],
        },
        Reference {
            geometry: Geometry::h3_plus(1.0).unwrap(),
            e_nuc: 1.322943027300000,
            e_hf: -1.195872578114329,
            s01: 0.4967349725645048,
            t01: 0.11172055723583332,
            v00: -2.0168937374155416,
            eri: [0.774998521297643, 0.478030322381190, 0.157925065942267, 0.309460793817333],
            sector: &[
                -1.231927388223,
                -1.043639276561,
                -0.833192989011,
                -0.582037436602,
                -0.534001947031,
                -0.233371202079,
                -0.153320824121,
                0.166831557190,
                0.480429189935,
            ],
        },
    ]
}

#[test]
fn integrals_match_reference() {
    for r in references() {
        let basis = sto6g_basis(&r.geometry).unwrap();
        let ints = build_integrals(&r.geometry, &basis).unwrap();
        assert!((ints.e_nuc - r.e_nuc).abs() < 1e-9, "e_nuc {} vs {}", ints.e_nuc, r.e_nuc);
        assert!((ints.overlap[(0, 1)] - r.s01).abs() < 1e-9);
        assert!((ints.kinetic[(0, 1)] - r.t01).abs() < 1e-9);
        assert!((ints.potential[(0, 0)] - r.v00).abs() < 1e-8);
        let got =
            [ints.eri.get(0, 0, 0, 0), ints.eri.get(0, 0, 1, 1), ints.eri.get(0, 1, 0, 1), ints.eri.get(0, 0, 0, 1)];
        for (g, w) in got.iter().zip(r.eri) {
            assert!((g - w).abs() < 1e-9, "eri {g} vs {w}");
        }
    }
}

#[test]
fn hartree_fock_energies_match_reference() {
    for r in references() {
        let basis = sto6g_basis(&r.geometry).unwrap();
        let ints = build_integrals(&r.geometry, &basis).unwrap();
        let scf = run_rhf(&ints, r.geometry.n_electrons()).unwrap();
        assert!(scf.converged);
        assert!((scf.e_hf - r.e_hf).abs() < 1e-8, "{} vs {}", scf.e_hf, r.e_hf);
    }
}

#[test]
fn hf_energy_reassembles_from_spin_orbital_integrals() {
    let err = common::hf_reassembly_error();
    assert!(err < 1e-10, "{err:e}");
}

#[test]
fn sector_spectra_match_reference_fci() {
    for r in references() {
        let basis = sto6g_basis(&r.geometry).unwrap();
        let ints = build_integrals(&r.geometry, &basis).unwrap();
        let scf = run_rhf(&ints, r.geometry.n_electrons()).unwrap();
        let h = jw_hamiltonian(&spin_orbital_integrals(&ints, &scf), ints.e_nuc).unwrap();
        let values = h.spectrum().sector_values(Sector::new(2, 0));
        assert_eq!(values.len(), r.sector.len());
        for (v, w) in values.iter().zip(r.sector) {
            assert!((v - w).abs() < 1e-8, "{v} vs {w}");
        }
    }
}
