use kings::reference::{file_name, king, king_config, king_json, REFERENCE_TWO_S};
use kings::search::find_king;
use kings::spin::fidelity;

#[test]
fn shipped_kings_are_reproduced_by_their_search() {
    for two_s in REFERENCE_TWO_S {
        let config = king_config(two_s).unwrap();
        let fresh = find_king(&config).unwrap();
        let shipped = king(two_s).unwrap();
        assert!(fresh.objective < config.tol, "{}", file_name(two_s));
        let f = fidelity(&fresh.state, &shipped).unwrap();
        assert!(1.0 - f < 1e-12, "2S={two_s}: infidelity {:e}", 1.0 - f);
    }
}

#[test]
fn unknown_spin_has_no_reference() {
    assert!(king_json(8).is_none());
    assert!(king_config(8).is_none());
    assert!(king(8).is_err());
}
