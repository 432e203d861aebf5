//! Worked saddle problems with closed-form proximal steps.

pub mod game;
pub mod lasso;
pub mod logreg;
pub mod quadratic;

pub use game::MatrixGame;
pub use lasso::Lasso;
pub use logreg::L1LogReg;
pub use quadratic::QuadraticSaddle;
