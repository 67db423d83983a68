//! File-backed persistence: one directory per board holding `board.json`,
//! plus a shared content-addressed blob directory. Every write goes to a
//! temporary file that is synced and then renamed over the target, so a
//! crash leaves either the old or the new document.

use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use recomb_core::{BlobId, BlobSink, Board};

fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().expect("store paths have a parent");
    let tmp = dir.join(format!(
        ".{}.{:016x}.tmp",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("file"),
        rand::rng().random::<u64>()
    ));
    let mut f = File::create(&tmp)?;
    f.write_all(bytes)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, path)?;
    if let Ok(d) = File::open(dir) {
        // Persist the rename itself; not supported everywhere.
        let _ = d.sync_all();
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct BoardStore {
    root: PathBuf,
}

impl BoardStore {
    pub fn open(root: impl Into<PathBuf>) -> io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(root.join("boards"))?;
        Ok(Self { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn board_dir(&self, id: &str) -> PathBuf {
        self.root.join("boards").join(id)
    }

    /// Board ids are generated here, so anything else is rejected before it
    /// reaches the filesystem.
    pub fn is_valid_id(id: &str) -> bool {
        id.len() <= 64
            && !id.is_empty()
            && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-')
    }

    /// Creates and persists an empty board with a fresh random id.
    pub fn create(&self, now_ms: u64) -> io::Result<Board> {
        loop {
            let id = format!("b-{:016x}", rand::rng().random::<u64>());
            let dir = self.board_dir(&id);
            match fs::create_dir(&dir) {
                Ok(()) => {
                    let board = Board::new(id, now_ms);
                    self.save(&board)?;
                    return Ok(board);
                }
                Err(e) if e.kind() == io::ErrorKind::AlreadyExists => continue,
                Err(e) => return Err(e),
            }
        }
    }

    pub fn load(&self, id: &str) -> io::Result<Option<Board>> {
        if !Self::is_valid_id(id) {
            return Ok(None);
        }
        match fs::read(self.board_dir(id).join("board.json")) {
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map(Some)
                .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn save(&self, board: &Board) -> io::Result<()> {
        let dir = self.board_dir(&board.id);
        fs::create_dir_all(&dir)?;
        let bytes = serde_json::to_vec_pretty(board).expect("boards serialize");
        write_atomic(&dir.join("board.json"), &bytes)
    }
}

/// Blobs stored as files named by their SHA-256.
#[derive(Debug, Clone)]
pub struct FileBlobs {
    dir: PathBuf,
}

impl FileBlobs {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }
}

impl BlobSink for FileBlobs {
    fn put(&self, bytes: &[u8]) -> io::Result<BlobId> {
        let id = BlobId::of(bytes);
        let path = self.dir.join(id.as_str());
        if !path.exists() {
            write_atomic(&path, bytes)?;
        }
        Ok(id)
    }

    fn get(&self, id: &BlobId) -> io::Result<Option<Vec<u8>>> {
        if !BlobId::is_well_formed(id.as_str()) {
            return Ok(None);
        }
        match fs::read(self.dir.join(id.as_str())) {
            Ok(b) => Ok(Some(b)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e),
        }
    }
}
