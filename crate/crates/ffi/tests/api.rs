use std::ffi::CStr;
use std::ptr;

use tmpa_ffi::*;

fn last_error() -> String {
    let p = tmpa_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_queries() {
    unsafe {
        let mut db = 0.0;
        assert_eq!(tmpa_pl5(0.0, &mut db), TmpaStatus::Ok);
        assert!((db + 13.9794).abs() < 1e-4);
        assert!(tmpa_last_error().is_null());

        let mut r = TmpaEfficiencies::default();
        assert_eq!(tmpa_efficiencies(0.0, 16, &mut r), TmpaStatus::Ok);
        assert!((r.eta - 8.0 / std::f64::consts::PI.powi(2)).abs() < 1e-12);
        assert!((r.eta_tma * r.eta_s - r.eta).abs() < 1e-12);

        let mut d = 0.0;
        assert_eq!(tmpa_design_delta(-22.0, &mut d), TmpaStatus::Ok);
        assert!((d - 0.068753).abs() < 1e-6);

        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(tmpa_dynamic_excitation(1, 0.0, 0.0, &mut re, &mut im), TmpaStatus::Ok);
        assert!(re.abs() < 1e-15 && (im + 4.0 / (std::f64::consts::PI * 2f64.sqrt())).abs() < 1e-12);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut db = 0.0;
        assert_eq!(tmpa_pl5(0.3, &mut db), TmpaStatus::OutOfRange);
        assert!(last_error().contains("0.3"));
        assert_eq!(tmpa_pl5(0.0, ptr::null_mut()), TmpaStatus::NullPointer);
        assert_eq!(tmpa_design_delta(-90.0, &mut db), TmpaStatus::OutOfRange);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(tmpa_dynamic_excitation(9, 0.0, 0.0, &mut re, &mut im), TmpaStatus::InvalidArgument);

        let mut delays = [0.0; 2];
        assert_eq!(tmpa_steering_delays(3, 60.0, 0.5, delays.as_mut_ptr(), 2), TmpaStatus::BufferTooSmall);
        let name = CStr::from_ptr(tmpa_status_name(TmpaStatus::BufferTooSmall));
        assert_eq!(name.to_str().unwrap(), "buffer_too_small");
        // A later success clears the message.
        assert_eq!(tmpa_pl5(0.0, &mut db), TmpaStatus::Ok);
        assert!(tmpa_last_error().is_null());
    }
}

#[test]
fn array_and_pattern_handles() {
    unsafe {
        let mut array = ptr::null_mut();
        assert_eq!(tmpa_array_steered(16, 0.5, 110.0, &mut array), TmpaStatus::Ok);

        let (mut closed, mut numerical) = (0.0, 0.0);
        assert_eq!(tmpa_array_directivity(array, 0.047, 41, &mut closed, &mut numerical), TmpaStatus::Ok);
        assert!((closed - 11.9427).abs() < 1e-3 && (closed - numerical).abs() < 0.02);

        let mut pattern = ptr::null_mut();
        assert_eq!(tmpa_pattern_compute(array, 0.047, 41, 1801, &mut pattern), TmpaStatus::Ok);
        assert_eq!(tmpa_pattern_points(pattern), 1801);
        assert_eq!(tmpa_pattern_harmonic_count(pattern), 14);

        let mut info = TmpaHarmonicInfo::default();
        assert_eq!(tmpa_pattern_harmonic_info(pattern, 0, &mut info), TmpaStatus::Ok);
        assert_eq!((info.q, info.band_sign), (1, 1));
        assert!((info.peak_theta_deg - 110.0).abs() < 0.1);
        assert_eq!(tmpa_pattern_harmonic_info(pattern, 2, &mut info), TmpaStatus::Ok);
        assert_eq!((info.q, info.band_sign), (7, -1));
        assert_eq!(tmpa_pattern_harmonic_info(pattern, 14, &mut info), TmpaStatus::InvalidArgument);

        let mut db = vec![0.0; 1801];
        assert_eq!(tmpa_pattern_db(pattern, 0, db.as_mut_ptr(), db.len()), TmpaStatus::Ok);
        assert_eq!(db.iter().cloned().fold(f64::NEG_INFINITY, f64::max), 0.0);
        let mut theta = vec![0.0; 1801];
        assert_eq!(tmpa_pattern_theta(pattern, theta.as_mut_ptr(), theta.len()), TmpaStatus::Ok);
        assert_eq!((theta[0], theta[1800]), (0.0, 180.0));

        tmpa_pattern_free(pattern);
        tmpa_array_free(array);
        tmpa_pattern_free(ptr::null_mut());
        tmpa_array_free(ptr::null_mut());
    }
}

#[test]
fn verify_through_handles() {
    unsafe {
        let delays = [0.13, 0.71, 0.42, 0.05];
        let mut array = ptr::null_mut();
        assert_eq!(tmpa_array_with_delays(4, 0.5, delays.as_ptr(), &mut array), TmpaStatus::Ok);
        let mut report = TmpaVerifyReport::default();
        assert_eq!(tmpa_verify(array, 0.05, 63.0, 4096, 41, &mut report), TmpaStatus::Ok);
        assert!(report.passed && report.max_abs_error < 1e-6);
        assert_eq!(tmpa_verify(array, 0.1, 63.0, 4096, 41, &mut report), TmpaStatus::OutOfRange);
        assert_eq!(tmpa_verify(array, 0.05, 63.0, 1000, 41, &mut report), TmpaStatus::InvalidArgument);
        tmpa_array_free(array);
        assert_eq!(tmpa_verify(ptr::null(), 0.05, 63.0, 4096, 41, &mut report), TmpaStatus::NullPointer);
    }
}
