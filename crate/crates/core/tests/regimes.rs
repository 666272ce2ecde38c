use spherefib_core::fibrations::{BetaMethod, FibrationCertificate, Regime};
use spherefib_core::problem::ProblemFile;
use spherefib_core::Error;

fn solve(text: &str) -> FibrationCertificate {
    let c = ProblemFile::parse(text).unwrap().solve().unwrap();
    let json = c.to_json();
    let back = FibrationCertificate::from_json(&json).unwrap();
    back.verify().unwrap();
    assert_eq!(back.to_json(), json);
    c
}

#[test]
fn one_problem_per_regime() {
    let c = solve("n = 2\nk = 2\nintersection = [[0, 1], [1, 0]]\n");
    assert_eq!(c.betas.method, BetaMethod::N2Full);

    let c = solve("n = 2\nk = 3\ninverse = [[1, 0, 0], [0, 1, 0], [0, 0, -1]]\n");
    assert_eq!(c.betas.method, BetaMethod::N2Simple);

    let c = solve("n = 4\nk = 3\ninverse = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]\ntorsion = [0, 5, 7]\n");
    assert!(matches!(c.betas.method, BetaMethod::N4Odd { .. }));

    let c = solve("n = 6\nk = 2\ninverse = [[0, 1], [1, 0]]\nprimes = [2]\n");
    assert_eq!(c.regime, Regime::Localized);

    let c = solve("n = 12\nk = 3\ninverse = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]\nstable_model = [5]\nstable = [[1], [2], [3]]\n");
    assert_eq!(c.regime, Regime::LargeK);
    assert!(c.fiber.ok());
}

#[test]
fn regime_errors() {
    let p = ProblemFile::parse("n = 6\nk = 2\ninverse = [[0, 1], [1, 0]]\n").unwrap();
    assert!(matches!(p.solve(), Err(Error::Data(_))));
    let p = ProblemFile::parse("n = 4\nk = 2\ninverse = [[2, 1], [1, 1]]\nregime = \"n2\"\n").unwrap();
    assert!(matches!(p.solve(), Err(Error::Precondition(_))));
    let p = ProblemFile::parse("n = 4\nk = 2\ninverse = [[1, 0], [0, 1]]\ntorsion = [2, 2]\n").unwrap();
    assert!(matches!(p.solve(), Err(Error::NoConstruction(_))));
}

#[test]
fn certificate_rejects_edits() {
    let c = solve("n = 4\nk = 2\ninverse = [[0, 1], [1, 0]]\ntorsion = [3, 2]\n");
    let json = c.to_json().replace("\"399 a1.nu + 4 a2.nu\"", "\"398 a1.nu + 4 a2.nu\"");
    assert_ne!(json, c.to_json());
    let back = FibrationCertificate::from_json(&json).unwrap();
    assert!(back.verify().is_err());
}
