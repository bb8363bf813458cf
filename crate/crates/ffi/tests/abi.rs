use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::ptr;

use acquis_ffi::*;

fn fixture(rel: &str) -> CString {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(rel);
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Takes ownership of a library string.
unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    acquis_string_free(s);
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(acquis_last_error()).to_string_lossy().into_owned() }
}

#[test]
fn celex_parse_format_and_url() {
    unsafe {
        let mut id = ptr::null_mut();
        let text = CString::new("42004D0097").unwrap();
        assert_eq!(acquis_celex_parse(text.as_ptr(), &mut id), AcquisStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(acquis_celex_format(id, &mut s), AcquisStatus::Ok);
        assert_eq!(take(s), "42004D0097");
        let fr = CString::new("fr").unwrap();
        assert_eq!(
            acquis_document_url(id, fr.as_ptr(), AcquisEndpoint::Lexuriserv, &mut s),
            AcquisStatus::Ok
        );
        assert_eq!(
            take(s),
            "http://europa.eu.int/eur-lex/lex/LexUriServ/LexUriServ.do?uri=CELEX:42004D0097:fr:HTML"
        );
        acquis_celex_free(id);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut id = ptr::null_mut();
        let bad = CString::new("2199D0624").unwrap();
        assert_eq!(acquis_celex_parse(bad.as_ptr(), &mut id), AcquisStatus::InvalidCelex);
        assert!(id.is_null());
        assert!(last_error().contains("2199D0624"), "{}", last_error());
        assert_eq!(acquis_celex_parse(ptr::null(), &mut id), AcquisStatus::NullPointer);
        assert_eq!(last_error(), "text is null");
        let bytes = [0xffu8, 0];
        assert_eq!(acquis_celex_parse(bytes.as_ptr().cast(), &mut id), AcquisStatus::InvalidUtf8);

        let part = CString::new("31999D0007(01)").unwrap();
        assert_eq!(acquis_celex_parse(part.as_ptr(), &mut id), AcquisStatus::Ok);
        let (en, mut s) = (CString::new("en").unwrap(), ptr::null_mut());
        assert_eq!(
            acquis_document_url(id, en.as_ptr(), AcquisEndpoint::Smartapi, &mut s),
            AcquisStatus::UnsupportedEndpoint
        );
        assert!(s.is_null());
        acquis_celex_free(id);

        let junk = CString::new("<TEI.2>").unwrap();
        let mut doc = ptr::null_mut();
        assert_eq!(acquis_tei_parse(junk.as_ptr(), &mut doc), AcquisStatus::InvalidTei);
        assert_eq!(acquis_standoff_xml_to_csv(junk.as_ptr(), &mut s), AcquisStatus::InvalidStandoff);
    }
}

#[test]
fn tei_round_trip_through_handles() {
    unsafe {
        let xml = fixture("tei/jrc42004D0097-fr.xml");
        let mut doc = ptr::null_mut();
        assert_eq!(acquis_tei_parse(xml.as_ptr(), &mut doc), AcquisStatus::Ok);
        let mut extent = 0;
        assert_eq!(acquis_tei_extent(doc, &mut extent), AcquisStatus::Ok);
        assert_eq!(extent, 40);
        let mut s = ptr::null_mut();
        assert_eq!(acquis_tei_serialize(doc, &mut s), AcquisStatus::Ok);
        assert_eq!(take(s), xml.to_str().unwrap());
        acquis_tei_free(doc);
    }
}

#[test]
fn gale_church_on_length_arrays() {
    unsafe {
        let src = [100usize, 200, 150];
        let tgt = [105usize, 190, 160];
        let (mut beads, mut n, mut total) = (ptr::null_mut(), 0, 0.0);
        let status =
            acquis_gale_church_align(src.as_ptr(), 3, tgt.as_ptr(), 3, &mut beads, &mut n, &mut total);
        assert_eq!(status, AcquisStatus::Ok);
        let got = std::slice::from_raw_parts(beads, n);
        assert_eq!(got.len(), 3);
        assert!(got.iter().enumerate().all(|(i, b)| b.src_start == i && b.src_len == 1 && b.tgt_len == 1));
        assert!((got.iter().map(|b| b.cost).sum::<f64>() - total).abs() < 1e-9);
        acquis_beads_free(beads, n);

        let status = acquis_gale_church_align(ptr::null(), 0, ptr::null(), 0, &mut beads, &mut n, &mut total);
        assert_eq!(status, AcquisStatus::Ok);
        assert!(beads.is_null());
        assert_eq!(n, 0);
        let status =
            acquis_gale_church_align(ptr::null(), 2, tgt.as_ptr(), 3, &mut beads, &mut n, &mut total);
        assert_eq!(status, AcquisStatus::NullPointer);
    }
}

#[test]
fn standoff_csv_and_inplace_output() {
    unsafe {
        let links = fixture("standoff/et-mt.standoff.xml");
        let mut s = ptr::null_mut();
        assert_eq!(acquis_standoff_xml_to_csv(links.as_ptr(), &mut s), AcquisStatus::Ok);
        let csv = take(s);
        assert!(csv.contains("\n31960D0511,2-1,6;7,6,\n"), "{csv}");

        let (mut et, mut mt) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(acquis_tei_parse(fixture("tei/jrc31960D0511-et.xml").as_ptr(), &mut et), AcquisStatus::Ok);
        assert_eq!(acquis_tei_parse(fixture("tei/jrc31960D0511-mt.xml").as_ptr(), &mut mt), AcquisStatus::Ok);
        assert_eq!(acquis_generate_inplace(et, mt, links.as_ptr(), &mut s), AcquisStatus::Ok);
        assert_eq!(take(s), fixture("bitext/jrc31960D0511-et-mt.xml").to_str().unwrap());

        let other = CString::new(r#"<linkList src="et" tgt="mt" params=""/>"#).unwrap();
        assert_eq!(acquis_generate_inplace(et, mt, other.as_ptr(), &mut s), AcquisStatus::InvalidArgument);
        assert_eq!(
            acquis_generate_inplace(et, ptr::null(), links.as_ptr(), &mut s),
            AcquisStatus::NullPointer
        );
        acquis_tei_free(et);
        acquis_tei_free(mt);
    }
}

#[test]
fn last_error_is_per_thread() {
    unsafe {
        let bad = CString::new("nonsense").unwrap();
        let mut id = ptr::null_mut();
        assert_eq!(acquis_celex_parse(bad.as_ptr(), &mut id), AcquisStatus::InvalidCelex);
    }
    let other = std::thread::spawn(|| acquis_last_error().is_null()).join().unwrap();
    assert!(other);
    assert!(!acquis_last_error().is_null());
    assert!(!unsafe { CStr::from_ptr(acquis_version()) }.to_bytes().is_empty());
}
