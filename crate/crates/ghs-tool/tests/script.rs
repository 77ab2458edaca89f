use ghs_tool::sample::Sampler;
use ghs_tool::script::{parse_move, replay};

#[test]
fn printed_moves_parse_back() {
    let mut sampler = Sampler::new(11);
    let mut seen = 0;
    for _ in 0..60 {
        let s = sampler.scenario(3);
        let Some(h) = sampler.ghs(&s, 2, 20) else {
            continue;
        };
        for mut mv in sampler.moves(&s, &h, 2) {
            mv.cleanup.clear();
            let step = parse_move(1, &mv.to_string()).unwrap();
            assert_eq!(step.mv, mv, "{}", mv);
            seen += 1;
        }
    }
    assert!(seen > 100, "only {} moves", seen);
}

#[test]
fn rejects_malformed_lines() {
    for bad in [
        "move",
        "move 0 below ns above ns",
        "move 0 below nx above ns joint 1",
        "move 0 below sep:1 above ns joint 1",
        "move 0 below ns above ns joint 2@0:C:+",
        "move 0 below ns above ns joint 2@0:A:*",
        "move 0 below ns above ns joint 1 remove middle",
        "move 0 below ns above ns joint 1 extra",
    ] {
        assert!(parse_move(3, bad).is_err(), "{}", bad);
        assert_eq!(parse_move(3, bad).unwrap_err().line, 3);
    }
    assert!(parse_move(1, "move 0 below ns@1,sep:1:2 above ns joint - remove lower").is_ok());
}

#[test]
fn empty_script_is_identity() {
    let s = ghs_core::bounds::flip_family(2).unwrap();
    let r = replay(&s.config.graph, &s.start, "# nothing\n\n");
    assert!(r.error.is_none() && r.steps.is_empty());
    assert_eq!(r.ghs, s.start);
}
