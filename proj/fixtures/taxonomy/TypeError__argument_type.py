play_audio_file("song.mp3")
